#pragma once

#include "rubric/combiners.hpp"
#include "rubric/corpus.hpp"
#include "rubric/rulebase.hpp"
#include "rubric/text_expr.hpp"
#include "rubric/trace.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rubric {

/// Relevance value v(c) in [0,1].
class ConceptValue {
 public:
  ConceptValue() = default;
  explicit ConceptValue(double v);

  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_ = 0.0;
};

struct AttributeInput {
  std::string name;
  std::optional<AttributeModifier> modifier;
  double value = 0.0;
};

/// Combines one concept's attribute values. Without modifiers this is
/// `combiner` (default "mean"). With any modifier: a failed NEC gate yields
/// 0, otherwise the saturating sum of all values; satisfied SUF attributes
/// then floor the result at their own value.
double combine_attributes(std::span<const AttributeInput> attrs, const CombinerRegistry& reg,
                          std::string_view combiner = "mean");

/// Default combiner for a category when no COMBINE rule overrides it.
std::string_view default_combiner(Category c);

/// Evaluates concepts of one RuleBase against documents.
///
/// Per-concept plans (resolved attributes, combiner names) are compiled on
/// first use and reused across documents. Values within a document are
/// memoized, so each concept is evaluated once per document.
class Engine {
 public:
  /// `rb` and `reg` must outlive the engine.
  Engine(const RuleBase& rb, const CombinerRegistry& reg, ProximityConfig prox = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  double value(std::string_view concept_name, const Document& doc) const;
  std::pair<ConceptValue, EvaluationTrace> evaluate(std::string_view concept_name,
                                                    const Document& doc) const;

  const RuleBase& rulebase() const { return *rb_; }

 private:
  struct Plan;
  class Session;
  const Plan& plan(const std::string& concept_name) const;

  const RuleBase* rb_;
  const CombinerRegistry* reg_;
  ProximityConfig prox_;
  mutable std::mutex plans_mu_;
  mutable std::map<std::string, std::unique_ptr<Plan>, std::less<>> plans_;
};

std::pair<ConceptValue, EvaluationTrace> evaluate_concept(std::string_view concept_name,
                                                          const Document& doc,
                                                          const RuleBase& rb,
                                                          const CombinerRegistry& reg,
                                                          const ProximityConfig& prox = {});

struct ExplainOptions {
  bool full = false;  // also print subtrees where nothing fired
};

/// Indented report, one line per trace node, values to 6 decimals.
std::string explain(const EvaluationTrace& trace, const ExplainOptions& opts = {});

/// Recomputes a node's value bottom-up from its leaves.
double recompute(const TraceNode& node, const CombinerRegistry& reg);

/// True when every node's stored value equals its recomputation exactly.
bool trace_consistent(const TraceNode& node, const CombinerRegistry& reg);

}  // namespace rubric
