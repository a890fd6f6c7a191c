#include "rubric/inference.hpp"

#include "rubric/error.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

namespace rubric {

ConceptValue::ConceptValue(double v) : value_(v) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error("concept value outside [0,1]");
}

std::string_view default_combiner(Category c) {
  return c == Category::Attribute ? "mean" : "max";
}

double combine_attributes(std::span<const AttributeInput> attrs, const CombinerRegistry& reg,
                          std::string_view combiner) {
  bool modified = std::any_of(attrs.begin(), attrs.end(),
                              [](const AttributeInput& a) { return a.modifier.has_value(); });
  std::vector<double> values;
  values.reserve(attrs.size());
  for (const auto& a : attrs) values.push_back(a.value);
  if (!modified) return reg.apply(combiner, values);

  bool gate_open = std::all_of(attrs.begin(), attrs.end(), [](const AttributeInput& a) {
    return !a.modifier || a.modifier->kind != ModifierKind::Nec ||
           a.value >= a.modifier->threshold.value_or(0.0);
  });
  double result = gate_open ? combine_saturating_sum(values) : 0.0;
  for (const auto& a : attrs)
    if (a.modifier && a.modifier->kind == ModifierKind::Suf &&
        a.value >= a.modifier->threshold.value_or(0.0))
      result = std::max(result, a.value);
  return result;
}

// ---------------------------------------------------------------------------

struct Engine::Plan {
  struct EvidenceInput {
    RuleId rule;
    const TextExpr* expr;
    double weight;
  };
  struct ImpliesInput {
    RuleId rule;
    std::string source;
    double weight;
  };
  struct ChildInput {
    RuleId rule;
    std::string child;
  };
  struct AttributeSlot {
    DeclaredAttribute decl;
    std::optional<ResolvedAttribute> binding;
  };

  std::vector<EvidenceInput> evidence;
  std::vector<ImpliesInput> implies;
  std::vector<ChildInput> children;
  std::vector<AttributeSlot> attributes;
  bool modified = false;
  std::string evidence_fn{default_combiner(Category::Evidence)};
  std::string taxonomy_fn{default_combiner(Category::Taxonomy)};
  std::string attribute_fn{default_combiner(Category::Attribute)};
  std::string cross_fn{default_combiner(Category::Cross)};
};

Engine::Engine(const RuleBase& rb, const CombinerRegistry& reg, ProximityConfig prox)
    : rb_(&rb), reg_(&reg), prox_(prox) {}

Engine::~Engine() = default;

const Engine::Plan& Engine::plan(const std::string& concept_name) const {
  std::lock_guard lock(plans_mu_);
  if (auto it = plans_.find(concept_name); it != plans_.end()) return *it->second;

  auto p = std::make_unique<Plan>();
  for (RuleId id : rb_->rules_mentioning(concept_name)) {
    const Rule& r = rb_->rule(id);
    if (auto* e = std::get_if<rules::Evidence>(&r.body); e && e->concept_name == concept_name) {
      p->evidence.push_back({id, &e->expr, e->weight});
    } else if (auto* i = std::get_if<rules::Implies>(&r.body); i && i->target == concept_name) {
      p->implies.push_back({id, i->source, i->weight});
    } else if (auto* c = std::get_if<rules::Combine>(&r.body); c && c->concept_name == concept_name) {
      if (!reg_->contains(c->function))
        throw Error("rule " + std::to_string(id) + ": unknown combiner '" + c->function + "'");
      switch (c->category) {
        case Category::Evidence:
          p->evidence_fn = c->function;
          break;
        case Category::Taxonomy:
          p->taxonomy_fn = c->function;
          break;
        case Category::Attribute:
          p->attribute_fn = c->function;
          break;
        case Category::Cross:
          p->cross_fn = c->function;
          break;
      }
    }
  }
  for (const auto& e : rb_->children_of(concept_name)) p->children.push_back({e.rule, e.child});
  for (auto& decl : attributes_of(concept_name, *rb_)) {
    p->modified |= decl.modifier.has_value();
    auto binding = resolve_attribute(concept_name, decl.name, *rb_);
    p->attributes.push_back({std::move(decl), std::move(binding)});
  }
  return *plans_.emplace(concept_name, std::move(p)).first->second;
}

// One document's evaluation: memo table plus optional trace construction.
class Engine::Session {
 public:
  Session(const Engine& engine, const Document& doc, bool tracing)
      : engine_(engine), doc_(doc), tracing_(tracing) {
    env_.document = &doc_;
    env_.proximity = engine.prox_;
    env_.concept_value = [this](const std::string& c) { return value(c); };
    if (tracing_) env_.concept_trace = [this](const std::string& c) { return trace(c); };
  }

  double value(const std::string& concept_name) {
    if (auto it = values_.find(concept_name); it != values_.end()) return it->second;
    if (!in_progress_.insert(concept_name).second)
      throw Error("cyclic dependency through concept " + concept_name);
    double v = compute(concept_name, nullptr);
    in_progress_.erase(concept_name);
    values_.emplace(concept_name, v);
    return v;
  }

  TraceNode trace(const std::string& concept_name) {
    if (auto it = traces_.find(concept_name); it != traces_.end()) return it->second;
    if (!in_progress_.insert(concept_name).second)
      throw Error("cyclic dependency through concept " + concept_name);
    TraceNode node;
    double v = compute(concept_name, &node);
    in_progress_.erase(concept_name);
    values_.emplace(concept_name, v);
    return traces_.emplace(concept_name, std::move(node)).first->second;
  }

 private:
  struct CategoryResult {
    Category category;
    std::string combiner;
    double value;
    std::vector<TraceNode> children;
  };

  double compute(const std::string& concept_name, TraceNode* node) {
    const Plan& p = engine_.plan(concept_name);
    const CombinerRegistry& reg = *engine_.reg_;
    std::vector<CategoryResult> cats;

    if (!p.evidence.empty() || !p.implies.empty()) {
      CategoryResult cat{Category::Evidence, p.evidence_fn, 0.0, {}};
      std::vector<double> inputs;
      for (const auto& e : p.evidence) {
        if (node) {
          TraceNode n = trace_expr(*e.expr, env_);
          inputs.push_back(e.weight * n.value);
          weighted(n, e.rule, e.weight);
          cat.children.push_back(std::move(n));
        } else {
          inputs.push_back(e.weight * eval_expr(*e.expr, env_));
        }
      }
      for (const auto& i : p.implies) {
        if (node) {
          TraceNode n = trace(i.source);
          inputs.push_back(i.weight * n.value);
          weighted(n, i.rule, i.weight);
          cat.children.push_back(std::move(n));
        } else {
          inputs.push_back(i.weight * value(i.source));
        }
      }
      cat.value = reg.apply(cat.combiner, inputs);
      cats.push_back(std::move(cat));
    }

    if (!p.children.empty()) {
      CategoryResult cat{Category::Taxonomy, p.taxonomy_fn, 0.0, {}};
      std::vector<double> inputs;
      for (const auto& c : p.children) {
        if (node) {
          TraceNode n = trace(c.child);
          n.rule = c.rule;
          inputs.push_back(n.value);
          cat.children.push_back(std::move(n));
        } else {
          inputs.push_back(value(c.child));
        }
      }
      cat.value = reg.apply(cat.combiner, inputs);
      cats.push_back(std::move(cat));
    }

    if (!p.attributes.empty()) {
      CategoryResult cat{Category::Attribute, p.modified ? "gated" : p.attribute_fn, 0.0, {}};
      std::vector<AttributeInput> inputs;
      for (const auto& slot : p.attributes) {
        AttributeInput in{slot.decl.name, slot.decl.modifier, 0.0};
        if (node) {
          TraceNode n;
          n.kind = TraceNode::Kind::Attribute;
          n.subject = slot.decl.name;
          n.combiner = "identity";
          n.modifier = slot.decl.modifier;
          if (slot.binding) {
            n.rule = slot.binding->rule;
            n.children.push_back(trace_expr(slot.binding->expr, env_));
            in.value = n.children.back().value;
          } else {
            n.rule = slot.decl.rule;
            n.note = "no DEFINES binding";
          }
          if (slot.decl.modifier) n.note = describe(*slot.decl.modifier) +
                                           (n.note.empty() ? "" : ", " + n.note);
          n.score = n.value = in.value;
          cat.children.push_back(std::move(n));
        } else if (slot.binding) {
          in.value = eval_expr(slot.binding->expr, env_);
        }
        inputs.push_back(std::move(in));
      }
      cat.value = combine_attributes(inputs, reg, p.attribute_fn);
      cats.push_back(std::move(cat));
    }

    double v = 0.0;
    if (!cats.empty()) {
      std::vector<double> xs;
      for (const auto& c : cats) xs.push_back(c.value);
      v = reg.apply(p.cross_fn, xs);
    }

    if (node) build_node(*node, concept_name, p, std::move(cats), v);
    return v;
  }

  static void weighted(TraceNode& n, RuleId rule, double weight) {
    n.rule = rule;
    n.weight = weight;
    n.score = n.value;
    n.value = weight * n.score;
  }

  static std::string describe(const AttributeModifier& m) {
    char buf[32] = "";
    if (m.threshold) std::snprintf(buf, sizeof buf, " %g", *m.threshold);
    switch (m.kind) {
      case ModifierKind::Nec:
        return std::string("NEC") + buf;
      case ModifierKind::Suf:
        return std::string("SUF") + buf;
      case ModifierKind::Aux:
        return "AUX";
    }
    return "";
  }

  static void build_node(TraceNode& node, const std::string& concept_name, const Plan& p,
                         std::vector<CategoryResult> cats, double v) {
    node = TraceNode{};
    node.kind = TraceNode::Kind::Concept;
    node.subject = concept_name;
    node.score = node.value = v;
    if (cats.empty()) {
      node.combiner = "none";
      node.note = "no rules";
      return;
    }
    if (cats.size() == 1 && CombinerRegistry::is_builtin(p.cross_fn)) {
      node.combiner = cats.front().combiner;
      node.note = std::string(category_name(cats.front().category));
      node.children = std::move(cats.front().children);
      return;
    }
    node.combiner = p.cross_fn;
    for (auto& c : cats) {
      TraceNode cn;
      cn.kind = TraceNode::Kind::Category;
      cn.subject = std::string(category_name(c.category));
      cn.combiner = c.combiner;
      cn.score = cn.value = c.value;
      cn.children = std::move(c.children);
      node.children.push_back(std::move(cn));
    }
  }

  const Engine& engine_;
  const Document& doc_;
  bool tracing_;
  EvalEnv env_;
  std::map<std::string, double> values_;
  std::map<std::string, TraceNode> traces_;
  std::set<std::string> in_progress_;
};

double Engine::value(std::string_view concept_name, const Document& doc) const {
  Session s(*this, doc, false);
  return s.value(std::string(concept_name));
}

std::pair<ConceptValue, EvaluationTrace> Engine::evaluate(std::string_view concept_name,
                                                          const Document& doc) const {
  Session s(*this, doc, true);
  TraceNode root = s.trace(std::string(concept_name));
  ConceptValue v(root.value);
  return {v, EvaluationTrace{doc.id(), std::move(root)}};
}

std::pair<ConceptValue, EvaluationTrace> evaluate_concept(std::string_view concept_name,
                                                          const Document& doc,
                                                          const RuleBase& rb,
                                                          const CombinerRegistry& reg,
                                                          const ProximityConfig& prox) {
  Engine engine(rb, reg, prox);
  return engine.evaluate(concept_name, doc);
}

// ---------------------------------------------------------------------------
// Trace checking and reporting

double recompute(const TraceNode& node, const CombinerRegistry& reg) {
  double score = node.score;
  if (!node.is_leaf()) {
    std::vector<double> xs;
    for (const auto& c : node.children) xs.push_back(recompute(c, reg));
    const std::string& fn = node.combiner;
    if (fn == "complement") {
      score = 1.0 - xs.front();
    } else if (fn == "identity") {
      score = xs.front();
    } else if (fn == "gated") {
      std::vector<AttributeInput> attrs;
      for (std::size_t i = 0; i < xs.size(); ++i)
        attrs.push_back({node.children[i].subject, node.children[i].modifier, xs[i]});
      score = combine_attributes(attrs, reg);
    } else {
      score = reg.apply(fn, xs);
    }
  }
  return node.weight ? *node.weight * score : score;
}

bool trace_consistent(const TraceNode& node, const CombinerRegistry& reg) {
  if (recompute(node, reg) != node.value) return false;
  return std::all_of(node.children.begin(), node.children.end(),
                     [&](const TraceNode& c) { return trace_consistent(c, reg); });
}

namespace {

bool fired(const TraceNode& n) {
  if (n.value > 0.0 || n.score > 0.0) return true;
  return std::any_of(n.children.begin(), n.children.end(), fired);
}

void render_node(const TraceNode& n, int depth, const ExplainOptions& opts, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += n.subject;
  if (n.rule) out += " rule=" + std::to_string(*n.rule);
  out += " combiner=" + n.combiner;
  char buf[64];
  if (n.weight) {
    std::snprintf(buf, sizeof buf, " weight=%g", *n.weight);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, " value=%.6f", n.value);
  out += buf;
  if (n.first_match) out += " at=word:" + std::to_string(*n.first_match);
  if (!n.note.empty()) out += " (" + n.note + ")";
  out += '\n';
  for (const auto& c : n.children)
    if (opts.full || fired(c)) render_node(c, depth + 1, opts, out);
}

}  // namespace

std::string explain(const EvaluationTrace& trace, const ExplainOptions& opts) {
  std::string out;
  render_node(trace.root, 0, opts, out);
  return out;
}

}  // namespace rubric
