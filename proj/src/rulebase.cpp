#include "rubric/rulebase.hpp"

#include "rubric/error.hpp"
#include "rubric/names.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <sstream>

namespace rubric {

std::string AttributeKey::str() const {
  return concept_name ? *concept_name + ":" + attribute : attribute;
}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Evidence:
      return "evidence";
    case Category::Taxonomy:
      return "taxonomy";
    case Category::Attribute:
      return "attribute";
    case Category::Cross:
      return "cross";
  }
  return "cross";
}

std::optional<Category> parse_category(std::string_view s) {
  for (auto c : {Category::Evidence, Category::Taxonomy, Category::Attribute, Category::Cross})
    if (category_name(c) == s) return c;
  return std::nullopt;
}

std::optional<double> Rule::weight() const {
  if (auto* e = std::get_if<rules::Evidence>(&body)) return e->weight;
  if (auto* i = std::get_if<rules::Implies>(&body)) return i->weight;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RuleBase

RuleBase::RuleBase(std::vector<Rule> rules) : rules_(std::move(rules)) {
  auto mention = [this](const std::string& name, RuleId id) {
    concepts_.insert(name);
    auto& ids = index_[name];
    if (ids.empty() || ids.back() != id) ids.push_back(id);
  };
  auto mention_expr = [&](const TextExpr& e, RuleId id) {
    std::set<std::string> refs;
    collect_concepts(e, refs);
    for (const auto& r : refs) mention(r, id);
  };

  for (std::size_t i = 0; i < rules_.size(); ++i) {
    Rule& rule = rules_[i];
    rule.id = i;
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, rules::Attribute>) {
            mention(r.concept_name, i);
          } else if constexpr (std::is_same_v<T, rules::Defines>) {
            if (r.key.concept_name) mention(*r.key.concept_name, i);
            mention_expr(r.expr, i);
          } else if constexpr (std::is_same_v<T, rules::Subset> ||
                               std::is_same_v<T, rules::Instance>) {
            mention(r.parent, i);
            mention(r.child, i);
            taxonomy_.push_back({r.parent, r.child, i});
          } else if constexpr (std::is_same_v<T, rules::Evidence>) {
            mention(r.concept_name, i);
            mention_expr(r.expr, i);
          } else if constexpr (std::is_same_v<T, rules::Implies>) {
            mention(r.target, i);
            mention(r.source, i);
          } else if constexpr (std::is_same_v<T, rules::Combine>) {
            mention(r.concept_name, i);
          }
        },
        rule.body);
  }
}

bool RuleBase::has_concept(std::string_view name) const {
  return concepts_.find(std::string(name)) != concepts_.end();
}

const std::vector<RuleId>& RuleBase::rules_mentioning(std::string_view name) const {
  static const std::vector<RuleId> kNone;
  auto it = index_.find(name);
  return it == index_.end() ? kNone : it->second;
}

std::vector<TaxonomyEdge> RuleBase::parents_of(std::string_view concept_name) const {
  std::vector<TaxonomyEdge> out;
  for (const auto& e : taxonomy_)
    if (e.child == concept_name) out.push_back(e);
  return out;
}

std::vector<TaxonomyEdge> RuleBase::children_of(std::string_view concept_name) const {
  std::vector<TaxonomyEdge> out;
  for (const auto& e : taxonomy_)
    if (e.parent == concept_name) out.push_back(e);
  return out;
}

RuleBase RuleBase::with_weight(RuleId id, double weight) const {
  if (id >= rules_.size()) throw Error("no rule with id " + std::to_string(id));
  if (!(weight >= 0.0 && weight <= 1.0))
    throw Error("weight outside [0,1]: " + std::to_string(weight));
  std::vector<Rule> copy = rules_;
  Rule& r = copy[id];
  if (auto* e = std::get_if<rules::Evidence>(&r.body))
    e->weight = weight;
  else if (auto* i = std::get_if<rules::Implies>(&r.body))
    i->weight = weight;
  else
    throw Error("rule " + std::to_string(id) + " is not an EVIDENCE or IMPLIES rule");
  return RuleBase(std::move(copy));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class FormError : public std::runtime_error {
 public:
  FormError(int line, const std::string& msg) : std::runtime_error(msg), line(line) {}
  int line;
};

[[noreturn]] void bad(const sexpr::Node& node, const std::string& msg) {
  throw FormError(node.line, msg);
}

std::string expect_name(const sexpr::Node& node, std::string_view what) {
  if (!node.is_symbol() || !is_valid_name(node.text))
    bad(node, "malformed " + std::string(what) + " name '" + node.text + "'");
  return to_lower(node.text);
}

double parse_weight(const sexpr::Node& node) {
  const std::string& t = node.text;
  bool digits = false;
  bool shape = node.is_symbol() && !t.empty();
  std::size_t dots = 0;
  for (char c : t) {
    if (c == '.')
      ++dots;
    else if (std::isdigit(static_cast<unsigned char>(c)))
      digits = true;
    else
      shape = false;
  }
  if (!shape || !digits || dots > 1) bad(node, "malformed weight '" + t + "'");
  double w = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), w, std::chars_format::fixed);
  if (ec != std::errc() || ptr != t.data() + t.size()) bad(node, "malformed weight '" + t + "'");
  if (w < 0.0 || w > 1.0) bad(node, "weight " + t + " outside [0,1]");
  return w;
}

void expect_arity(const sexpr::Node& form, std::string_view head, std::size_t n) {
  if (form.items.size() != n + 1)
    bad(form, "arity mismatch: " + std::string(head) + " takes " + std::to_string(n) +
                  " arguments, got " + std::to_string(form.items.size() - 1));
}

AttributeKey parse_key(const sexpr::Node& node) {
  if (!node.is_symbol()) bad(node, "malformed attribute key");
  const std::string& t = node.text;
  auto colon = t.find(':');
  if (colon == std::string::npos) return {std::nullopt, expect_name(node, "attribute")};
  std::string concept_name = t.substr(0, colon);
  std::string attr = t.substr(colon + 1);
  if (!is_valid_name(concept_name) || !is_valid_name(attr))
    bad(node, "malformed concept:attribute key '" + t + "'");
  return {to_lower(concept_name), to_lower(attr)};
}

std::optional<ModifierKind> modifier_kind(const sexpr::Node& node) {
  if (!node.is_symbol()) return std::nullopt;
  std::string s = to_upper(node.text);
  if (s == "*NEC*") return ModifierKind::Nec;
  if (s == "*SUF*") return ModifierKind::Suf;
  if (s == "*AUX*") return ModifierKind::Aux;
  return std::nullopt;
}

rules::Attribute parse_attribute(const sexpr::Node& form) {
  expect_arity(form, "ATTRIBUTE", 2);
  rules::Attribute r;
  r.concept_name = expect_name(form.items[1], "concept");
  const auto& spec = form.items[2];
  if (spec.is_symbol()) {
    r.attribute = expect_name(spec, "attribute");
    return r;
  }
  if (!spec.is_list() || spec.items.size() != 2)
    bad(spec, "malformed attribute specification");

  // (*AUX* a) or (*NEC* a) without threshold
  if (auto kind = modifier_kind(spec.items[0])) {
    r.attribute = expect_name(spec.items[1], "attribute");
    r.modifier = AttributeModifier{*kind, std::nullopt};
    return r;
  }
  // ((*NEC* a) t)
  const auto& inner = spec.items[0];
  if (!inner.is_list() || inner.items.size() != 2 || !modifier_kind(inner.items[0]))
    bad(spec, "malformed attribute specification");
  auto kind = *modifier_kind(inner.items[0]);
  if (kind == ModifierKind::Aux) bad(spec, "*AUX* attributes take no threshold");
  r.attribute = expect_name(inner.items[1], "attribute");
  r.modifier = AttributeModifier{kind, parse_weight(spec.items[1])};
  return r;
}

template <class Body>
Body parse_edge(const sexpr::Node& form, std::string_view head) {
  expect_arity(form, head, 2);
  return Body{expect_name(form.items[1], "concept"), expect_name(form.items[2], "concept")};
}

RuleBody parse_form(const sexpr::Node& form) {
  if (!form.is_list() || form.items.empty()) bad(form, "expected a rule form");
  const auto& head = form.items[0];
  if (!head.is_symbol()) bad(head, "rule must start with a rule type");
  std::string h = to_upper(head.text);

  if (h == "ATTRIBUTE") return parse_attribute(form);
  if (h == "SUBSET") return parse_edge<rules::Subset>(form, h);
  if (h == "INSTANCE") return parse_edge<rules::Instance>(form, h);
  if (h == "DEFINES") {
    expect_arity(form, h, 2);
    return rules::Defines{parse_key(form.items[1]), parse_expr(form.items[2])};
  }
  if (h == "EVIDENCE") {
    expect_arity(form, h, 2);
    const auto& pair = form.items[2];
    if (!pair.is_list() || pair.items.size() != 2)
      bad(pair, "EVIDENCE expects (expression weight)");
    return rules::Evidence{expect_name(form.items[1], "concept"), parse_expr(pair.items[0]),
                           parse_weight(pair.items[1])};
  }
  if (h == "IMPLIES") {
    expect_arity(form, h, 2);
    const auto& pair = form.items[2];
    if (!pair.is_list() || pair.items.size() != 2)
      bad(pair, "IMPLIES expects (concept weight)");
    return rules::Implies{expect_name(form.items[1], "concept"),
                          expect_name(pair.items[0], "concept"), parse_weight(pair.items[1])};
  }
  if (h == "COMBINE") {
    if (form.items.size() == 3)
      return rules::Combine{expect_name(form.items[1], "concept"), Category::Cross,
                            expect_name(form.items[2], "combiner")};
    expect_arity(form, h, 3);
    auto cat = parse_category(to_lower(form.items[2].text));
    if (!form.items[2].is_symbol() || !cat)
      bad(form.items[2], "unknown combination category '" + form.items[2].text + "'");
    return rules::Combine{expect_name(form.items[1], "concept"), *cat,
                          expect_name(form.items[3], "combiner")};
  }
  bad(head, "unknown rule head '" + head.text + "'");
}

std::string format_weight(double w) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, w, std::chars_format::fixed);
  return std::string(buf, ptr);
}

std::string modifier_prefix(ModifierKind k) {
  switch (k) {
    case ModifierKind::Nec:
      return "*NEC*";
    case ModifierKind::Suf:
      return "*SUF*";
    case ModifierKind::Aux:
      return "*AUX*";
  }
  return "*AUX*";
}

}  // namespace

RuleBase parse_rulebase(std::string_view source) {
  auto forms = sexpr::read_all(source);
  std::vector<Rule> rules;
  std::vector<Diagnostic> diags;
  for (const auto& form : forms) {
    try {
      rules.push_back(Rule{rules.size(), form.line, parse_form(form)});
    } catch (const FormError& e) {
      diags.push_back({e.line, e.what()});
    } catch (const ParseError& e) {
      for (const auto& d : e.diagnostics()) diags.push_back(d);
    }
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return RuleBase(std::move(rules));
}

std::string serialize(const Rule& rule) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, rules::Attribute>) {
          std::string spec = r.attribute;
          if (r.modifier) {
            spec = "(" + modifier_prefix(r.modifier->kind) + " " + r.attribute + ")";
            if (r.modifier->threshold)
              spec = "(" + spec + " " + format_weight(*r.modifier->threshold) + ")";
          }
          return "(ATTRIBUTE " + r.concept_name + " " + spec + ")";
        } else if constexpr (std::is_same_v<T, rules::Defines>) {
          return "(DEFINES " + r.key.str() + " " + render(r.expr) + ")";
        } else if constexpr (std::is_same_v<T, rules::Subset>) {
          return "(SUBSET " + r.parent + " " + r.child + ")";
        } else if constexpr (std::is_same_v<T, rules::Instance>) {
          return "(INSTANCE " + r.parent + " " + r.child + ")";
        } else if constexpr (std::is_same_v<T, rules::Evidence>) {
          return "(EVIDENCE " + r.concept_name + " (" + render(r.expr) + " " +
                 format_weight(r.weight) + "))";
        } else if constexpr (std::is_same_v<T, rules::Implies>) {
          return "(IMPLIES " + r.target + " (" + r.source + " " + format_weight(r.weight) +
                 "))";
        } else {
          return "(COMBINE " + r.concept_name + " " + std::string(category_name(r.category)) + " " +
                 r.function + ")";
        }
      },
      rule.body);
}

std::string serialize(const RuleBase& rb) {
  std::string out;
  for (const auto& r : rb.rules()) out += serialize(r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Inheritance

namespace {

// Taxonomy ancestors grouped by breadth-first depth, starting with the
// concept itself at depth 0.
std::vector<std::vector<std::string>> ancestor_levels(std::string_view concept_name,
                                                      const RuleBase& rb) {
  std::vector<std::vector<std::string>> levels{{std::string(concept_name)}};
  std::set<std::string, std::less<>> seen{std::string(concept_name)};
  for (;;) {
    std::vector<std::string> next;
    for (const auto& c : levels.back())
      for (const auto& e : rb.parents_of(c))
        if (seen.insert(e.parent).second) next.push_back(e.parent);
    if (next.empty()) break;
    levels.push_back(std::move(next));
  }
  return levels;
}

}  // namespace

std::optional<ResolvedAttribute> resolve_attribute(std::string_view concept_name,
                                                   std::string_view attr,
                                                   const RuleBase& rb) {
  auto pick = [&](const std::vector<const Rule*>& bindings,
                  const std::string& where) -> std::optional<ResolvedAttribute> {
    if (bindings.empty()) return std::nullopt;
    const auto& first = std::get<rules::Defines>(bindings.front()->body);
    for (const Rule* r : bindings) {
      if (std::get<rules::Defines>(r->body).expr != first.expr)
        throw Error("ambiguous inheritance for " + std::string(concept_name) + ":" +
                    std::string(attr) + " (" + where + "): rules " +
                    std::to_string(bindings.front()->id) + " and " + std::to_string(r->id) +
                    " bind it differently");
    }
    return ResolvedAttribute{first.expr, bindings.front()->id};
  };

  for (const auto& level : ancestor_levels(concept_name, rb)) {
    std::vector<const Rule*> bindings;
    for (const auto& r : rb.rules()) {
      auto* d = std::get_if<rules::Defines>(&r.body);
      if (d && d->key.attribute == attr && d->key.concept_name &&
          std::find(level.begin(), level.end(), *d->key.concept_name) != level.end())
        bindings.push_back(&r);
    }
    if (auto found = pick(bindings, "local bindings")) return found;
  }
  std::vector<const Rule*> globals;
  for (const auto& r : rb.rules()) {
    auto* d = std::get_if<rules::Defines>(&r.body);
    if (d && d->key.attribute == attr && !d->key.concept_name) globals.push_back(&r);
  }
  return pick(globals, "global bindings");
}

std::vector<DeclaredAttribute> attributes_of(std::string_view concept_name, const RuleBase& rb) {
  std::map<std::string, DeclaredAttribute> decided;
  for (const auto& level : ancestor_levels(concept_name, rb)) {
    std::map<std::string, DeclaredAttribute> here;
    for (const auto& r : rb.rules()) {
      auto* a = std::get_if<rules::Attribute>(&r.body);
      if (!a || decided.contains(a->attribute) ||
          std::find(level.begin(), level.end(), a->concept_name) == level.end())
        continue;
      auto [it, inserted] = here.emplace(a->attribute, DeclaredAttribute{a->attribute, a->modifier, r.id});
      if (!inserted && it->second.modifier != a->modifier)
        throw Error("ambiguous inheritance for " + std::string(concept_name) + ":" + a->attribute +
                    ": rules " + std::to_string(it->second.rule) + " and " +
                    std::to_string(r.id) + " declare it with different modifiers");
    }
    decided.merge(here);
  }
  std::vector<DeclaredAttribute> out;
  for (auto& [name, d] : decided) out.push_back(std::move(d));
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

struct DepEdge {
  std::string to;
  RuleId rule;
};

using DepGraph = std::map<std::string, std::vector<DepEdge>>;

// Edges point from a dependency to the concept whose value depends on it.
DepGraph dependency_graph(const RuleBase& rb) {
  DepGraph g;
  for (const auto& c : rb.concepts()) g[c];

  // Concepts that carry each attribute, ignoring modifier conflicts.
  std::map<std::string, std::vector<std::string>> carriers;
  for (const auto& c : rb.concepts()) {
    std::set<std::string> names;
    for (const auto& level : ancestor_levels(c, rb))
      for (const auto& r : rb.rules())
        if (auto* a = std::get_if<rules::Attribute>(&r.body))
          if (std::find(level.begin(), level.end(), a->concept_name) != level.end())
            names.insert(a->attribute);
    for (const auto& n : names) carriers[n].push_back(c);
  }

  for (const auto& r : rb.rules()) {
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, rules::Subset> || std::is_same_v<T, rules::Instance>) {
            g[b.child].push_back({b.parent, r.id});
          } else if constexpr (std::is_same_v<T, rules::Implies>) {
            g[b.source].push_back({b.target, r.id});
          } else if constexpr (std::is_same_v<T, rules::Evidence>) {
            std::set<std::string> refs;
            collect_concepts(b.expr, refs);
            for (const auto& ref : refs) g[ref].push_back({b.concept_name, r.id});
          } else if constexpr (std::is_same_v<T, rules::Defines>) {
            std::set<std::string> refs;
            collect_concepts(b.expr, refs);
            for (const auto& user : carriers[b.key.attribute]) {
              if (b.key.concept_name) {
                bool inherits = false;
                for (const auto& level : ancestor_levels(user, rb))
                  inherits |= std::find(level.begin(), level.end(), *b.key.concept_name) != level.end();
                if (!inherits) continue;
              }
              for (const auto& ref : refs) g[ref].push_back({user, r.id});
            }
          }
        },
        r.body);
  }
  return g;
}

struct CycleSearch {
  const DepGraph& g;
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::vector<std::string> order;    // reverse topological
  std::vector<ValidationIssue> cycles;

  void visit(const std::string& n) {
    color[n] = 1;
    stack.push_back(n);
    for (const auto& e : g.at(n)) {
      int c = color[e.to];
      if (c == 0) {
        visit(e.to);
      } else if (c == 1) {
        auto from = std::find(stack.begin(), stack.end(), e.to);
        std::string msg = "cycle: ";
        for (auto it = from; it != stack.end(); ++it) msg += *it + "→";
        msg += e.to;
        cycles.push_back({e.rule, msg});
      }
    }
    stack.pop_back();
    color[n] = 2;
    order.push_back(n);
  }

  void run() {
    for (const auto& [n, _] : g)
      if (color[n] == 0) visit(n);
  }
};

void near_self_pairs(const TextExpr& e, std::vector<std::string>& out) {
  if ((e.op == ExprOp::NearW || e.op == ExprOp::NearS || e.op == ExprOp::NearP) &&
      e.args.size() == 2 && e.args[0] == e.args[1])
    out.push_back(render(e));
  for (const auto& a : e.args) near_self_pairs(a, out);
}

}  // namespace

std::optional<std::vector<std::string>> dependency_order(const RuleBase& rb) {
  auto g = dependency_graph(rb);
  CycleSearch search{g, {}, {}, {}, {}};
  search.run();
  if (!search.cycles.empty()) return std::nullopt;
  std::reverse(search.order.begin(), search.order.end());
  return search.order;
}

ValidationReport validate(const RuleBase& rb, const CombinerRegistry& reg) {
  ValidationReport report;
  auto error = [&](RuleId id, std::string msg) { report.errors.push_back({id, std::move(msg)}); };
  auto warn = [&](std::optional<RuleId> id, std::string msg) {
    report.warnings.push_back({id, std::move(msg)});
  };

  auto g = dependency_graph(rb);
  CycleSearch search{g, {}, {}, {}, {}};
  search.run();
  for (auto& c : search.cycles) report.errors.push_back(std::move(c));

  std::map<std::pair<std::string, Category>, RuleId> combines;
  std::map<std::pair<std::string, std::string>, const rules::Attribute*> declared;
  std::map<std::string, const Rule*> defines_by_key;
  std::set<std::string> grounded;

  for (const auto& r : rb.rules()) {
    if (auto* a = std::get_if<rules::Attribute>(&r.body)) {
      grounded.insert(a->concept_name);
      if (a->modifier && a->modifier->kind != ModifierKind::Aux && !a->modifier->threshold)
        error(r.id, "attribute " + a->concept_name + ":" + a->attribute + " is " +
                        modifier_prefix(a->modifier->kind) + " but has no threshold");
      auto [it, inserted] = declared.emplace(std::pair{a->concept_name, a->attribute}, a);
      if (!inserted && it->second->modifier != a->modifier)
        error(r.id, "conflicting ATTRIBUTE declarations for " + a->concept_name + ":" + a->attribute);
    } else if (auto* c = std::get_if<rules::Combine>(&r.body)) {
      auto [it, inserted] = combines.emplace(std::pair{c->concept_name, c->category}, r.id);
      if (!inserted)
        error(r.id, "duplicate COMBINE for " + c->concept_name + " (" +
                        std::string(category_name(c->category)) + "), first at rule " +
                        std::to_string(it->second));
      if (!reg.contains(c->function))
        error(r.id, "COMBINE names unregistered function '" + c->function + "'");
    } else if (auto* e = std::get_if<rules::Evidence>(&r.body)) {
      grounded.insert(e->concept_name);
    } else if (auto* i = std::get_if<rules::Implies>(&r.body)) {
      grounded.insert(i->target);
    } else if (auto* s = std::get_if<rules::Subset>(&r.body)) {
      grounded.insert(s->parent);
    } else if (auto* in = std::get_if<rules::Instance>(&r.body)) {
      grounded.insert(in->parent);
    }
  }

  for (const auto& r : rb.rules()) {
    auto* d = std::get_if<rules::Defines>(&r.body);
    if (!d) continue;
    auto [it, inserted] = defines_by_key.emplace(d->key.str(), &r);
    if (!inserted && std::get<rules::Defines>(it->second->body).expr != d->expr)
      error(r.id, "conflicting DEFINES for " + d->key.str() + ", first at rule " +
                      std::to_string(it->second->id));

    bool ok = false;
    if (d->key.concept_name) {
      grounded.insert(*d->key.concept_name);
      for (const auto& level : ancestor_levels(*d->key.concept_name, rb))
        for (const auto& c : level) ok |= declared.contains({c, d->key.attribute});
    } else {
      for (const auto& [key, _] : declared) ok |= key.second == d->key.attribute;
    }
    if (!ok) error(r.id, "DEFINES " + d->key.str() + " binds an undeclared attribute");
  }

  // Concepts inheriting attributes are grounded too.
  for (const auto& c : rb.concepts()) {
    if (grounded.contains(c)) continue;
    for (const auto& level : ancestor_levels(c, rb))
      for (const auto& a : level)
        for (const auto& [key, _] : declared)
          if (key.first == a) grounded.insert(c);
  }

  for (const auto& c : rb.concepts()) {
    if (!grounded.contains(c))
      warn(rb.rules_mentioning(c).front(),
           "concept " + c + " has no EVIDENCE, IMPLIES, DEFINES or taxonomy rules; it evaluates to 0");
    if (rb.concepts().contains(c + "s"))
      warn(rb.rules_mentioning(c).front(),
           "concepts " + c + " and " + c + "s differ only by a trailing 's'");
  }

  for (const auto& [key, a] : declared) {
    bool bound = false;
    for (const auto& [k, _] : defines_by_key) {
      auto colon = k.find(':');
      std::string attr = colon == std::string::npos ? k : k.substr(colon + 1);
      bound |= attr == key.second;
    }
    if (!bound)
      warn(std::nullopt, "attribute " + key.first + ":" + key.second +
                             " has no DEFINES binding; it evaluates to 0");
  }

  for (const auto& r : rb.rules()) {
    const TextExpr* e = nullptr;
    if (auto* ev = std::get_if<rules::Evidence>(&r.body)) e = &ev->expr;
    if (auto* d = std::get_if<rules::Defines>(&r.body)) e = &d->expr;
    if (!e) continue;
    std::vector<std::string> selfs;
    near_self_pairs(*e, selfs);
    for (const auto& s : selfs) warn(r.id, s + " pairs a pattern with itself");
  }

  return report;
}

}  // namespace rubric
