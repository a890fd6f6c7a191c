#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rubric::testing {

namespace {

std::size_t absdiff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

double ref_max(const std::vector<double>& xs) {
  double m = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) m = i == 0 ? xs[i] : (xs[i] > m ? xs[i] : m);
  return m;
}

double ref_min(const std::vector<double>& xs) {
  double m = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) m = i == 0 ? xs[i] : (xs[i] < m ? xs[i] : m);
  return m;
}

double ref_sum(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

double ref_combine(const std::string& fn, const std::vector<double>& xs,
                   const CombinerRegistry& reg) {
  if (xs.empty()) return 0.0;
  if (fn == "max") return ref_max(xs);
  if (fn == "min") return ref_min(xs);
  if (fn == "mean") return ref_sum(xs) / static_cast<double>(xs.size());
  if (fn == "saturating-sum") return std::min(1.0, ref_sum(xs));
  return reg.get(fn)(xs);
}

std::vector<std::string> phrase_pattern(const TextExpr& e) {
  std::vector<std::string> words;
  for (const auto& a : e.args) words.insert(words.end(), a.words.begin(), a.words.end());
  return words;
}

// Pairwise operators (distance and location) by exhaustive pair scan.
double pairwise(const TextExpr& e, const Document& doc, const ProximityConfig& prox) {
  const auto& toks = doc.tokens();
  double best = 0.0;
  for (std::size_t a : brute_occurrences(doc, e.args[0].words)) {
    for (std::size_t b : brute_occurrences(doc, e.args[1].words)) {
      std::size_t dw = absdiff(a, b);
      std::size_t ds = absdiff(toks[a].sentence_index, toks[b].sentence_index);
      std::size_t dp = absdiff(toks[a].paragraph_index, toks[b].paragraph_index);
      double v = 0.0;
      auto near = [](std::size_t d, std::size_t w) {
        return d >= w ? 0.0 : (static_cast<double>(w) - static_cast<double>(d)) /
                                  static_cast<double>(w);
      };
      switch (e.op) {
        case ExprOp::NearW: v = near(dw, prox.window_words); break;
        case ExprOp::NearS: v = near(ds, prox.window_sentences); break;
        case ExprOp::NearP: v = near(dp, prox.window_paragraphs); break;
        case ExprOp::Sentence: v = ds == 0 ? 1.0 : 0.0; break;
        case ExprOp::Paragraph: v = dp == 0 ? 1.0 : 0.0; break;
        case ExprOp::Precedes: v = a < b ? 1.0 : 0.0; break;
        case ExprOp::Within: v = dw <= e.window ? 1.0 : 0.0; break;
        default: throw std::logic_error("not a pairwise operator");
      }
      best = std::max(best, v);
    }
  }
  return best;
}

class Reference {
 public:
  Reference(const Document& doc, const RuleBase& rb, const CombinerRegistry& reg,
            const ProximityConfig& prox)
      : doc_(doc), rb_(rb), reg_(reg), prox_(prox) {}

  double concept_value(const std::string& c, int depth = 0) {
    if (depth > 64) throw std::runtime_error("reference: dependency too deep");
    std::string evidence_fn = "max", taxonomy_fn = "max", attribute_fn = "mean",
                cross_fn = "max";
    std::vector<double> evidence;
    std::vector<double> children;
    for (const auto& r : rb_.rules()) {
      if (auto* e = std::get_if<rules::Evidence>(&r.body); e && e->concept_name == c)
        evidence.push_back(e->weight * expr(e->expr, depth));
      if (auto* k = std::get_if<rules::Combine>(&r.body); k && k->concept_name == c) {
        switch (k->category) {
          case Category::Evidence: evidence_fn = k->function; break;
          case Category::Taxonomy: taxonomy_fn = k->function; break;
          case Category::Attribute: attribute_fn = k->function; break;
          case Category::Cross: cross_fn = k->function; break;
        }
      }
    }
    // IMPLIES after EVIDENCE, both in rule order.
    for (const auto& r : rb_.rules())
      if (auto* i = std::get_if<rules::Implies>(&r.body); i && i->target == c)
        evidence.push_back(i->weight * concept_value(i->source, depth + 1));
    for (const auto& r : rb_.rules()) {
      if (auto* s = std::get_if<rules::Subset>(&r.body); s && s->parent == c)
        children.push_back(concept_value(s->child, depth + 1));
      if (auto* s = std::get_if<rules::Instance>(&r.body); s && s->parent == c)
        children.push_back(concept_value(s->child, depth + 1));
    }

    std::vector<double> cats;
    if (!evidence.empty()) cats.push_back(ref_combine(evidence_fn, evidence, reg_));
    if (!children.empty()) cats.push_back(ref_combine(taxonomy_fn, children, reg_));

    auto attrs = carried_attributes(c);
    if (!attrs.empty()) {
      bool modified = false;
      std::vector<double> values;
      for (const auto& [name, mod] : attrs) {
        modified |= mod.has_value();
        const TextExpr* b = binding(c, name);
        values.push_back(b ? expr(*b, depth) : 0.0);
      }
      if (!modified) {
        cats.push_back(ref_combine(attribute_fn, values, reg_));
      } else {
        bool open = true;
        std::size_t i = 0;
        for (const auto& [name, mod] : attrs) {
          if (mod && mod->kind == ModifierKind::Nec && values[i] < *mod->threshold) open = false;
          ++i;
        }
        double v = open ? std::min(1.0, ref_sum(values)) : 0.0;
        i = 0;
        for (const auto& [name, mod] : attrs) {
          if (mod && mod->kind == ModifierKind::Suf && values[i] >= *mod->threshold)
            v = std::max(v, values[i]);
          ++i;
        }
        cats.push_back(v);
      }
    }
    return cats.empty() ? 0.0 : ref_combine(cross_fn, cats, reg_);
  }

  double expr(const TextExpr& e, int depth) {
    switch (e.op) {
      case ExprOp::Literal: return brute_occurrences(doc_, e.words).empty() ? 0.0 : 1.0;
      case ExprOp::Phrase: return brute_occurrences(doc_, phrase_pattern(e)).empty() ? 0.0 : 1.0;
      case ExprOp::Concept: return concept_value(e.name, depth + 1);
      case ExprOp::Not: return 1.0 - expr(e.args[0], depth);
      case ExprOp::And:
      case ExprOp::Or:
      case ExprOp::BestOf:
      case ExprOp::WeightOf: {
        std::vector<double> xs;
        for (const auto& a : e.args) xs.push_back(expr(a, depth));
        if (e.op == ExprOp::And) return ref_min(xs);
        if (e.op == ExprOp::WeightOf) return ref_sum(xs) / static_cast<double>(xs.size());
        return ref_max(xs);
      }
      default: return pairwise(e, doc_, prox_);
    }
  }

 private:
  std::vector<std::string> parents(const std::string& c) const {
    std::vector<std::string> out;
    for (const auto& r : rb_.rules()) {
      if (auto* s = std::get_if<rules::Subset>(&r.body); s && s->child == c) out.push_back(s->parent);
      if (auto* s = std::get_if<rules::Instance>(&r.body); s && s->child == c) out.push_back(s->parent);
    }
    return out;
  }

  // Levels of the ancestor graph: {c}, parents, grandparents, ...
  std::vector<std::vector<std::string>> levels(const std::string& c) const {
    std::vector<std::vector<std::string>> out{{c}};
    std::set<std::string> seen{c};
    while (true) {
      std::vector<std::string> next;
      for (const auto& x : out.back())
        for (auto& p : parents(x))
          if (seen.insert(p).second) next.push_back(p);
      if (next.empty()) break;
      out.push_back(std::move(next));
    }
    return out;
  }

  std::map<std::string, std::optional<AttributeModifier>> carried_attributes(
      const std::string& c) const {
    std::map<std::string, std::optional<AttributeModifier>> out;
    for (const auto& level : levels(c)) {
      std::map<std::string, std::optional<AttributeModifier>> here;
      for (const auto& x : level)
        for (const auto& r : rb_.rules())
          if (auto* a = std::get_if<rules::Attribute>(&r.body); a && a->concept_name == x)
            here.emplace(a->attribute, a->modifier);
      for (auto& [k, v] : here) out.emplace(k, v);  // nearer levels already present win
    }
    return out;
  }

  const TextExpr* binding(const std::string& c, const std::string& attr) const {
    for (const auto& level : levels(c))
      for (const auto& x : level)
        for (const auto& r : rb_.rules())
          if (auto* d = std::get_if<rules::Defines>(&r.body);
              d && d->key.concept_name == x && d->key.attribute == attr)
            return &d->expr;
    for (const auto& r : rb_.rules())
      if (auto* d = std::get_if<rules::Defines>(&r.body);
          d && !d->key.concept_name && d->key.attribute == attr)
        return &d->expr;
    return nullptr;
  }

  const Document& doc_;
  const RuleBase& rb_;
  const CombinerRegistry& reg_;
  ProximityConfig prox_;
};

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

double random_weight(std::mt19937_64& rng) {
  // Mix grid values (ties, exact gates) with arbitrary doubles.
  if (chance(rng, 0.5)) return static_cast<double>(pick(rng, 11)) / 10.0;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

TextExpr random_literal(std::mt19937_64& rng, std::size_t max_words = 2) {
  std::vector<std::string> words;
  std::size_t n = 1 + (chance(rng, 0.25) ? pick(rng, max_words) : 0);
  for (std::size_t i = 0; i < n; ++i) words.push_back(vocabulary()[pick(rng, vocabulary().size())]);
  return TextExpr::literal(std::move(words));
}

TextExpr random_pairwise(std::mt19937_64& rng, bool graded) {
  static const ExprOp crisp_ops[] = {ExprOp::Sentence, ExprOp::Paragraph, ExprOp::Precedes,
                                     ExprOp::Within};
  static const ExprOp graded_ops[] = {ExprOp::NearW, ExprOp::NearS, ExprOp::NearP};
  ExprOp op = graded && chance(rng, 0.5) ? graded_ops[pick(rng, 3)] : crisp_ops[pick(rng, 4)];
  if (op == ExprOp::Within)
    return TextExpr::within(1 + pick(rng, 10), random_literal(rng), random_literal(rng));
  return TextExpr::make(op, {random_literal(rng), random_literal(rng)});
}

TextExpr random_phrase(std::mt19937_64& rng) {
  std::vector<TextExpr> parts;
  std::size_t n = 2 + pick(rng, 2);
  for (std::size_t i = 0; i < n; ++i) parts.push_back(random_literal(rng, 1));
  return TextExpr::make(ExprOp::Phrase, std::move(parts));
}

// Graded expression; `refs` are the concepts it may reference.
TextExpr random_graded_expr(std::mt19937_64& rng, int depth, const std::vector<std::string>& refs,
                            bool not_over_concepts) {
  const bool can_ref = !refs.empty();
  if (depth <= 0 || chance(rng, 0.35)) {
    std::size_t k = pick(rng, can_ref ? 4 : 3);
    if (k == 0) return random_literal(rng);
    if (k == 1) return random_pairwise(rng, true);
    if (k == 2) return random_phrase(rng);
    return TextExpr::concept_ref(refs[pick(rng, refs.size())]);
  }
  std::size_t k = pick(rng, can_ref ? 5 : 3);
  switch (k) {
    case 0:
    case 1: {
      std::vector<TextExpr> args;
      std::size_t n = 2 + pick(rng, 2);
      for (std::size_t i = 0; i < n; ++i)
        args.push_back(random_graded_expr(rng, depth - 1, refs, not_over_concepts));
      return TextExpr::make(k == 0 ? ExprOp::And : ExprOp::Or, std::move(args));
    }
    case 2: {
      // Without NOT over concepts, the operand is concept-free.
      static const std::vector<std::string> none;
      return TextExpr::make(ExprOp::Not, {random_graded_expr(rng, depth - 1,
                                                             not_over_concepts ? refs : none,
                                                             not_over_concepts)});
    }
    default: {
      std::vector<TextExpr> args;
      std::size_t n = 1 + pick(rng, 3);
      for (std::size_t i = 0; i < n; ++i)
        args.push_back(TextExpr::concept_ref(refs[pick(rng, refs.size())]));
      return TextExpr::make(k == 3 ? ExprOp::BestOf : ExprOp::WeightOf, std::move(args));
    }
  }
}

AttributeModifier random_modifier(std::mt19937_64& rng) {
  static const double thresholds[] = {0.0, 0.25, 0.5, 0.6, 0.9, 1.0};
  switch (pick(rng, 3)) {
    case 0: return {ModifierKind::Nec, thresholds[pick(rng, 6)]};
    case 1: return {ModifierKind::Suf, thresholds[pick(rng, 6)]};
    default: return {ModifierKind::Aux, std::nullopt};
  }
}

Rule make_rule(RuleBody body) { return Rule{0, 0, std::move(body)}; }

std::string cname(std::size_t i) { return "c" + std::to_string(i); }

RuleBase generate(std::mt19937_64& rng, const GenOptions& opts) {
  const std::size_t n = 2 + pick(rng, std::max<std::size_t>(opts.max_concepts, 2) - 1);
  // c0..c{s-1} are structural (taxonomy, attributes); the rest are "pure"
  // concepts, the only ones DEFINES bindings may reference. Every dependency
  // points from a lower index to a higher one, so the graph is a DAG.
  const std::size_t s = std::max<std::size_t>(1, (n + 1) / 2);
  const std::vector<std::string> attrs = {"a0", "a1", "a2", "a3"};
  std::vector<Rule> rs;

  auto higher = [&](std::size_t i, std::size_t from) {
    std::vector<std::string> out;
    for (std::size_t j = std::max(i + 1, from); j < n; ++j) out.push_back(cname(j));
    return out;
  };

  // Taxonomy forest over structural concepts.
  std::vector<std::optional<std::size_t>> parent(n);
  std::set<std::size_t> parents;
  for (std::size_t i = 1; i < s; ++i) {
    if (!chance(rng, 0.6)) continue;
    parent[i] = pick(rng, i);
    parents.insert(*parent[i]);
    if (chance(rng, 0.5))
      rs.push_back(make_rule(rules::Subset{cname(*parent[i]), cname(i)}));
    else
      rs.push_back(make_rule(rules::Instance{cname(*parent[i]), cname(i)}));
  }

  auto bare_parent = [&](std::size_t i) { return opts.taxonomy_only_parents && parents.count(i); };

  // Attribute declarations, then bindings.
  std::map<std::size_t, std::set<std::string>> declared;
  if (opts.attributes) {
    for (std::size_t i = 0; i < s; ++i) {
      if (bare_parent(i) || !chance(rng, 0.5)) continue;
      std::size_t k = 1 + pick(rng, 3);
      for (std::size_t j = 0; j < k; ++j) {
        const std::string& a = attrs[pick(rng, attrs.size())];
        if (!declared[i].insert(a).second) continue;
        std::optional<AttributeModifier> mod;
        if (chance(rng, 0.4)) mod = random_modifier(rng);
        rs.push_back(make_rule(rules::Attribute{cname(i), a, mod}));
      }
    }
    const auto pure = higher(s - 1, s);
    std::set<std::string> any_declared;
    for (auto& [i, as] : declared) any_declared.insert(as.begin(), as.end());
    for (const auto& a : any_declared)
      if (chance(rng, 0.7))
        rs.push_back(make_rule(rules::Defines{
            {std::nullopt, a}, random_graded_expr(rng, 2, pure, opts.not_over_concepts)}));
    for (auto& [i, as] : declared)
      for (const auto& a : as)
        if (chance(rng, 0.3))
          rs.push_back(make_rule(rules::Defines{
              {cname(i), a}, random_graded_expr(rng, 2, pure, opts.not_over_concepts)}));
  }

  // Evidence and implication.
  for (std::size_t i = 0; i < n; ++i) {
    if (bare_parent(i)) continue;
    const auto refs = higher(i, 0);
    std::size_t k = pick(rng, 3);
    for (std::size_t j = 0; j < k; ++j)
      rs.push_back(make_rule(rules::Evidence{
          cname(i), random_graded_expr(rng, 2, refs, opts.not_over_concepts), random_weight(rng)}));
    if (!refs.empty() && chance(rng, 0.3))
      rs.push_back(make_rule(rules::Implies{cname(i), refs[pick(rng, refs.size())],
                                            random_weight(rng)}));
  }

  if (opts.combine_rules) {
    static const char* fns[] = {"max", "min", "mean", "saturating-sum"};
    static const Category cats[] = {Category::Evidence, Category::Taxonomy, Category::Attribute,
                                    Category::Cross};
    for (std::size_t i = 0; i < n; ++i) {
      std::set<int> used;
      std::size_t k = chance(rng, 0.3) ? 1 + pick(rng, 2) : 0;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t c = pick(rng, 4);
        if (!used.insert(static_cast<int>(c)).second) continue;
        rs.push_back(make_rule(rules::Combine{cname(i), cats[c], fns[pick(rng, 4)]}));
      }
    }
  }

  // Make sure the root is mentioned.
  if (rs.empty() || !RuleBase(rs).has_concept("c0"))
    rs.push_back(make_rule(rules::Evidence{"c0", random_literal(rng), random_weight(rng)}));

  std::shuffle(rs.begin(), rs.end(), rng);
  return RuleBase(std::move(rs));
}

}  // namespace

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {"reagan", "gorbachev", "summit", "moscow",
                                                 "arms", "talks", "salt", "geneva"};
  return words;
}

std::vector<std::size_t> brute_occurrences(const Document& doc,
                                           const std::vector<std::string>& pattern) {
  std::vector<std::size_t> out;
  const auto& toks = doc.tokens();
  if (pattern.empty() || pattern.size() > toks.size()) return out;
  for (std::size_t i = 0; i + pattern.size() <= toks.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < pattern.size() && ok; ++j) ok = toks[i + j].text == pattern[j];
    if (ok) out.push_back(i);
  }
  return out;
}

bool crisp_oracle(const TextExpr& e, const Document& doc) {
  switch (e.op) {
    case ExprOp::Literal: return !brute_occurrences(doc, e.words).empty();
    case ExprOp::Phrase: return !brute_occurrences(doc, phrase_pattern(e)).empty();
    case ExprOp::Not: return !crisp_oracle(e.args[0], doc);
    case ExprOp::And:
      return std::all_of(e.args.begin(), e.args.end(),
                         [&](const TextExpr& a) { return crisp_oracle(a, doc); });
    case ExprOp::Or:
      return std::any_of(e.args.begin(), e.args.end(),
                         [&](const TextExpr& a) { return crisp_oracle(a, doc); });
    case ExprOp::Sentence:
    case ExprOp::Paragraph:
    case ExprOp::Precedes:
    case ExprOp::Within: {
      const auto& toks = doc.tokens();
      for (std::size_t a : brute_occurrences(doc, e.args[0].words))
        for (std::size_t b : brute_occurrences(doc, e.args[1].words)) {
          if (e.op == ExprOp::Sentence && toks[a].sentence_index == toks[b].sentence_index)
            return true;
          if (e.op == ExprOp::Paragraph && toks[a].paragraph_index == toks[b].paragraph_index)
            return true;
          if (e.op == ExprOp::Precedes && a < b) return true;
          if (e.op == ExprOp::Within && absdiff(a, b) <= e.window) return true;
        }
      return false;
    }
    default: throw std::logic_error("crisp_oracle: graded operator");
  }
}

double reference_value(const std::string& concept_name, const Document& doc, const RuleBase& rb,
                       const CombinerRegistry& reg, const ProximityConfig& prox) {
  return Reference(doc, rb, reg, prox).concept_value(concept_name);
}

std::string random_document_text(std::mt19937_64& rng, std::size_t max_words) {
  static const char* separators[] = {" ", " ", " ", " ", ", ", ". ", "! ", "? ", "\n", "\n\n",
                                     "-", " \n \n"};
  std::size_t n = pick(rng, max_words + 1);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) text += separators[pick(rng, std::size(separators))];
    std::string w = vocabulary()[pick(rng, vocabulary().size())];
    if (chance(rng, 0.15)) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    text += w;
  }
  if (n && chance(rng, 0.5)) text += ".";
  return text;
}

Document random_document(std::mt19937_64& rng, std::size_t max_words) {
  return tokenize("doc", random_document_text(rng, max_words));
}

TextExpr random_crisp_expr(std::mt19937_64& rng, int depth) {
  if (depth <= 0 || chance(rng, 0.3)) {
    std::size_t k = pick(rng, 3);
    if (k == 0) return random_literal(rng);
    if (k == 1) return random_pairwise(rng, false);
    return random_phrase(rng);
  }
  std::size_t k = pick(rng, 3);
  if (k == 2) return TextExpr::make(ExprOp::Not, {random_crisp_expr(rng, depth - 1)});
  std::vector<TextExpr> args;
  std::size_t n = 2 + pick(rng, 2);
  for (std::size_t i = 0; i < n; ++i) args.push_back(random_crisp_expr(rng, depth - 1));
  return TextExpr::make(k == 0 ? ExprOp::And : ExprOp::Or, std::move(args));
}

RuleBase random_rulebase(std::mt19937_64& rng, const GenOptions& opts) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    RuleBase rb = generate(rng, opts);
    if (validate(rb).ok()) return rb;
  }
  throw std::runtime_error("random_rulebase: no valid rule base in 100 attempts");
}

}  // namespace rubric::testing
