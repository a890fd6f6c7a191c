#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace rubric {

using RuleId = std::size_t;

enum class ModifierKind { Nec, Suf, Aux };

struct AttributeModifier {
  ModifierKind kind = ModifierKind::Aux;
  std::optional<double> threshold;  // NEC/SUF only

  friend bool operator==(const AttributeModifier&, const AttributeModifier&) = default;
};

/// One node of an evaluation trace.
///
/// `score` is the node's unweighted value: for interior nodes it is
/// `combiner` applied to the children's `value`s, for leaves it is the match
/// value read off the document. `value` is `weight * score` when the node is
/// the antecedent of an EVIDENCE/IMPLIES rule, otherwise equal to `score`.
struct TraceNode {
  enum class Kind { Concept, Category, Attribute, Expr };

  Kind kind = Kind::Expr;
  std::string subject;
  std::optional<RuleId> rule;
  std::string combiner;
  std::optional<double> weight;
  double score = 0.0;
  double value = 0.0;
  std::optional<AttributeModifier> modifier;  // Attribute nodes
  std::optional<std::size_t> first_match;     // literal leaves
  std::string note;
  std::vector<TraceNode> children;

  bool is_leaf() const { return children.empty(); }
};

struct EvaluationTrace {
  std::string document_id;
  TraceNode root;
};

}  // namespace rubric
