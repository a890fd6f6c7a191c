#pragma once

#include "rubric/combiners.hpp"
#include "rubric/text_expr.hpp"
#include "rubric/trace.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rubric {

/// `attribute` alone is a global binding; with `concept` it is the local
/// variant written `concept:attribute`.
struct AttributeKey {
  std::optional<std::string> concept_name;
  std::string attribute;

  std::string str() const;
  friend bool operator==(const AttributeKey&, const AttributeKey&) = default;
};

enum class Category { Evidence, Taxonomy, Attribute, Cross };

std::string_view category_name(Category c);
std::optional<Category> parse_category(std::string_view s);

namespace rules {

struct Attribute {
  std::string concept_name;
  std::string attribute;
  std::optional<AttributeModifier> modifier;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Defines {
  AttributeKey key;
  TextExpr expr;
  friend bool operator==(const Defines&, const Defines&) = default;
};

struct Subset {
  std::string parent;
  std::string child;
  friend bool operator==(const Subset&, const Subset&) = default;
};

struct Instance {
  std::string parent;  // the class
  std::string child;   // the member
  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Evidence {
  std::string concept_name;
  TextExpr expr;
  double weight = 1.0;
  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct Implies {
  std::string target;
  std::string source;
  double weight = 1.0;
  friend bool operator==(const Implies&, const Implies&) = default;
};

struct Combine {
  std::string concept_name;
  Category category = Category::Cross;
  std::string function;
  friend bool operator==(const Combine&, const Combine&) = default;
};

}  // namespace rules

using RuleBody = std::variant<rules::Attribute, rules::Defines, rules::Subset,
                              rules::Instance, rules::Evidence, rules::Implies,
                              rules::Combine>;

struct Rule {
  RuleId id = 0;
  int line = 0;  // source line, 0 when built programmatically
  RuleBody body;

  /// Weight of an EVIDENCE or IMPLIES rule.
  std::optional<double> weight() const;

  friend bool operator==(const Rule& a, const Rule& b) { return a.id == b.id && a.body == b.body; }
};

struct TaxonomyEdge {
  std::string parent;
  std::string child;
  RuleId rule = 0;
};

/// Immutable, indexed rule collection. Rule ids equal positions.
class RuleBase {
 public:
  RuleBase() = default;
  /// Renumbers ids densely in the given order and builds the indexes.
  explicit RuleBase(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  const Rule& rule(RuleId id) const { return rules_.at(id); }

  /// Every concept named anywhere in the rules (including expression refs).
  const std::set<std::string>& concepts() const { return concepts_; }
  bool has_concept(std::string_view name) const;
  /// Rules that mention `name`, in id order.
  const std::vector<RuleId>& rules_mentioning(std::string_view name) const;

  const std::vector<TaxonomyEdge>& taxonomy() const { return taxonomy_; }
  std::vector<TaxonomyEdge> parents_of(std::string_view concept_name) const;
  std::vector<TaxonomyEdge> children_of(std::string_view concept_name) const;

  /// Copy with one EVIDENCE/IMPLIES weight replaced. Throws rubric::Error when
  /// `id` is out of range or names an unweighted rule.
  RuleBase with_weight(RuleId id, double weight) const;

  friend bool operator==(const RuleBase& a, const RuleBase& b) { return a.rules_ == b.rules_; }

 private:
  std::vector<Rule> rules_;
  std::set<std::string> concepts_;
  std::map<std::string, std::vector<RuleId>, std::less<>> index_;
  std::vector<TaxonomyEdge> taxonomy_;
};

/// Throws ParseError listing every malformed rule with its line number.
RuleBase parse_rulebase(std::string_view source);

/// Canonical text: one rule per line, lowercase symbols, shortest weights.
std::string serialize(const RuleBase& rb);
std::string serialize(const Rule& rule);

struct ValidationIssue {
  std::optional<RuleId> rule;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const RuleBase& rb, const CombinerRegistry& reg = {});

/// Concepts in dependency order (every concept after everything it depends
/// on), or nullopt when the dependency graph has a cycle.
std::optional<std::vector<std::string>> dependency_order(const RuleBase& rb);

struct ResolvedAttribute {
  TextExpr expr;
  RuleId rule;
};

/// DEFINES binding for `concept:attr`: the local binding, else the nearest
/// taxonomy ancestor's local binding (breadth-first), else the global one.
/// Throws rubric::Error when two bindings at the same depth disagree.
std::optional<ResolvedAttribute> resolve_attribute(std::string_view concept_name,
                                                   std::string_view attr,
                                                   const RuleBase& rb);

struct DeclaredAttribute {
  std::string name;
  std::optional<AttributeModifier> modifier;
  RuleId rule;
};

/// Attributes a concept carries: its own ATTRIBUTE rules plus those
/// inherited from taxonomy ancestors (nearest declaration wins), sorted by
/// attribute name. Throws rubric::Error on equal-depth conflicting modifiers.
std::vector<DeclaredAttribute> attributes_of(std::string_view concept_name, const RuleBase& rb);

}  // namespace rubric
