#pragma once

#include "rubric/corpus.hpp"
#include "rubric/sexpr.hpp"
#include "rubric/trace.hpp"

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace rubric {

enum class ExprOp {
  Literal,
  Concept,
  And,
  Or,
  Not,
  NearW,
  NearS,
  NearP,
  Sentence,
  Paragraph,
  Precedes,
  Within,
  Phrase,
  BestOf,
  WeightOf,
};

/// Text reference expression.
///
/// Literal carries its lowercased `words` (a multi-word string is an implicit
/// phrase); Concept carries `name`; Within carries `window`. Every other
/// operator keeps its operands in `args`. Pairwise distance and location
/// operators hold exactly two Literal args, Phrase two or more, BestOf and
/// WeightOf only Concept args.
struct TextExpr {
  ExprOp op = ExprOp::Literal;
  std::vector<std::string> words;
  std::string name;
  std::size_t window = 0;
  std::vector<TextExpr> args;

  static TextExpr literal(std::vector<std::string> words);
  static TextExpr literal(std::string_view text);
  static TextExpr concept_ref(std::string name);
  static TextExpr make(ExprOp op, std::vector<TextExpr> args);
  static TextExpr within(std::size_t n, TextExpr a, TextExpr b);

  friend bool operator==(const TextExpr&, const TextExpr&) = default;
};

/// Surface spelling of an operator, e.g. `*AND*` or `NEAR-W`.
std::string_view op_name(ExprOp op);

/// Throws ParseError (with the node's line) when the form is malformed.
TextExpr parse_expr(const sexpr::Node& node);

/// Canonical surface form: uppercase operators and literals, lowercase
/// concept symbols, single spaces.
std::string render(const TextExpr& e);

/// Concepts referenced anywhere inside `e`.
void collect_concepts(const TextExpr& e, std::set<std::string>& out);
bool references_concepts(const TextExpr& e);

/// Windows used to normalize NEAR-W/S/P distances into [0,1].
struct ProximityConfig {
  std::size_t window_words = 10;
  std::size_t window_sentences = 3;
  std::size_t window_paragraphs = 2;
};

struct EvalEnv {
  const Document* document = nullptr;
  std::function<double(const std::string&)> concept_value;
  // Optional; when set, tracing expands concept references through it.
  std::function<TraceNode(const std::string&)> concept_trace;
  ProximityConfig proximity;
};

double eval_expr(const TextExpr& e, const EvalEnv& env);

/// Same value as eval_expr, recorded as a trace subtree.
TraceNode trace_expr(const TextExpr& e, const EvalEnv& env);

/// Normalized proximity of the closest occurrence pair: max(0, (W - d) / W).
double proximity_score(std::size_t distance, std::size_t window);

}  // namespace rubric
