#include "rubric/text_expr.hpp"

#include "rubric/combiners.hpp"
#include "rubric/error.hpp"
#include "rubric/names.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <utility>

namespace rubric {

namespace {

struct OpSpelling {
  ExprOp op;
  std::string_view name;
};

constexpr std::array<OpSpelling, 13> kOperators = {{
    {ExprOp::And, "*AND*"},
    {ExprOp::Or, "*OR*"},
    {ExprOp::Not, "*NOT*"},
    {ExprOp::NearW, "NEAR-W"},
    {ExprOp::NearS, "NEAR-S"},
    {ExprOp::NearP, "NEAR-P"},
    {ExprOp::Sentence, "SENTENCE"},
    {ExprOp::Paragraph, "PARAGRAPH"},
    {ExprOp::Precedes, "PRECEDES"},
    {ExprOp::Within, "WITHIN"},
    {ExprOp::Phrase, "PHRASE"},
    {ExprOp::BestOf, "BEST-OF"},
    {ExprOp::WeightOf, "WEIGHT-OF"},
}};

[[noreturn]] void fail(const sexpr::Node& node, std::string message) {
  throw ParseError({Diagnostic{node.line, std::move(message)}});
}

TextExpr parse_literal_arg(const sexpr::Node& node, std::string_view op) {
  if (!node.is_string())
    fail(node, std::string(op) + " takes quoted text arguments");
  return parse_expr(node);
}

TextExpr parse_concept_arg(const sexpr::Node& node, std::string_view op) {
  if (!node.is_symbol())
    fail(node, std::string(op) + " takes concept arguments");
  return parse_expr(node);
}

}  // namespace

std::string_view op_name(ExprOp op) {
  for (const auto& s : kOperators)
    if (s.op == op) return s.name;
  return op == ExprOp::Literal ? "literal" : "concept";
}

TextExpr TextExpr::literal(std::vector<std::string> words) {
  TextExpr e;
  e.op = ExprOp::Literal;
  e.words = std::move(words);
  return e;
}

TextExpr TextExpr::literal(std::string_view text) { return literal(split_words(text)); }

TextExpr TextExpr::concept_ref(std::string name) {
  TextExpr e;
  e.op = ExprOp::Concept;
  e.name = to_lower(name);
  return e;
}

TextExpr TextExpr::make(ExprOp op, std::vector<TextExpr> args) {
  TextExpr e;
  e.op = op;
  e.args = std::move(args);
  return e;
}

TextExpr TextExpr::within(std::size_t n, TextExpr a, TextExpr b) {
  TextExpr e = make(ExprOp::Within, {std::move(a), std::move(b)});
  e.window = n;
  return e;
}

TextExpr parse_expr(const sexpr::Node& node) {
  if (node.is_string()) {
    auto words = split_words(node.text);
    if (words.empty()) fail(node, "text pattern \"" + node.text + "\" contains no words");
    return TextExpr::literal(std::move(words));
  }
  if (node.is_symbol()) {
    if (!is_valid_name(node.text))
      fail(node, "malformed concept name '" + node.text + "'");
    return TextExpr::concept_ref(node.text);
  }
  if (node.items.empty()) fail(node, "empty expression");
  const auto& head = node.items.front();
  if (!head.is_symbol()) fail(node, "expression must start with an operator");
  std::string spelled = to_upper(head.text);
  auto found = std::find_if(kOperators.begin(), kOperators.end(),
                            [&](const OpSpelling& s) { return s.name == spelled; });
  if (found == kOperators.end()) fail(head, "unknown operator '" + head.text + "'");

  const ExprOp op = found->op;
  std::span<const sexpr::Node> rest(node.items.begin() + 1, node.items.end());
  auto arity = [&](bool ok, std::string_view expected) {
    if (!ok)
      fail(node, "arity mismatch: " + spelled + " takes " + std::string(expected) +
                     ", got " + std::to_string(rest.size()));
  };

  std::vector<TextExpr> args;
  switch (op) {
    case ExprOp::And:
    case ExprOp::Or:
      arity(rest.size() >= 2, "at least 2 arguments");
      for (const auto& a : rest) args.push_back(parse_expr(a));
      return TextExpr::make(op, std::move(args));
    case ExprOp::Not:
      arity(rest.size() == 1, "1 argument");
      return TextExpr::make(op, {parse_expr(rest[0])});
    case ExprOp::Within: {
      arity(rest.size() == 3, "a word count and 2 text arguments");
      const auto& n = rest[0];
      std::size_t window = 0;
      auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), window);
      if (!n.is_symbol() || ec != std::errc() || ptr != n.text.data() + n.text.size() ||
          window == 0)
        fail(n, "WITHIN needs a positive integer word count, got '" + n.text + "'");
      return TextExpr::within(window, parse_literal_arg(rest[1], spelled),
                              parse_literal_arg(rest[2], spelled));
    }
    case ExprOp::Phrase:
      arity(rest.size() >= 2, "at least 2 text arguments");
      for (const auto& a : rest) args.push_back(parse_literal_arg(a, spelled));
      return TextExpr::make(op, std::move(args));
    case ExprOp::BestOf:
    case ExprOp::WeightOf:
      arity(!rest.empty(), "at least 1 concept");
      for (const auto& a : rest) args.push_back(parse_concept_arg(a, spelled));
      return TextExpr::make(op, std::move(args));
    default:
      arity(rest.size() == 2, "2 text arguments");
      for (const auto& a : rest) args.push_back(parse_literal_arg(a, spelled));
      return TextExpr::make(op, std::move(args));
  }
}

std::string render(const TextExpr& e) {
  switch (e.op) {
    case ExprOp::Literal: {
      std::string out = "\"";
      for (std::size_t i = 0; i < e.words.size(); ++i) {
        if (i) out += ' ';
        out += to_upper(e.words[i]);
      }
      return out + "\"";
    }
    case ExprOp::Concept:
      return e.name;
    default: {
      std::string out = "(";
      out += op_name(e.op);
      if (e.op == ExprOp::Within) out += " " + std::to_string(e.window);
      for (const auto& a : e.args) out += " " + render(a);
      return out + ")";
    }
  }
}

void collect_concepts(const TextExpr& e, std::set<std::string>& out) {
  if (e.op == ExprOp::Concept) out.insert(e.name);
  for (const auto& a : e.args) collect_concepts(a, out);
}

bool references_concepts(const TextExpr& e) {
  if (e.op == ExprOp::Concept) return true;
  return std::any_of(e.args.begin(), e.args.end(),
                     [](const TextExpr& a) { return references_concepts(a); });
}

double proximity_score(std::size_t distance, std::size_t window) {
  if (distance >= window) return 0.0;
  const double w = static_cast<double>(window);
  return (w - static_cast<double>(distance)) / w;
}

namespace {

std::vector<std::string> phrase_words(const TextExpr& e) {
  std::vector<std::string> words;
  for (const auto& a : e.args) words.insert(words.end(), a.words.begin(), a.words.end());
  return words;
}

struct PairResult {
  double value = 0.0;
  std::optional<std::size_t> at;
};

// Best pairwise score for the distance and location operators.
PairResult eval_pairwise(const TextExpr& e, const EvalEnv& env) {
  const Document& doc = *env.document;
  auto as = occurrences(doc, e.args[0].words);
  auto bs = occurrences(doc, e.args[1].words);
  PairResult best;
  if (as.empty() || bs.empty()) return best;

  auto consider = [&](double v, const PatternOccurrence& a) {
    if (v > best.value) {
      best.value = v;
      best.at = a.start;
    }
  };
  for (const auto& a : as) {
    for (const auto& b : bs) {
      switch (e.op) {
        case ExprOp::NearW:
          consider(proximity_score(distance(doc, a, b, DistanceUnit::Word),
                                   env.proximity.window_words), a);
          break;
        case ExprOp::NearS:
          consider(proximity_score(distance(doc, a, b, DistanceUnit::Sentence),
                                   env.proximity.window_sentences), a);
          break;
        case ExprOp::NearP:
          consider(proximity_score(distance(doc, a, b, DistanceUnit::Paragraph),
                                   env.proximity.window_paragraphs), a);
          break;
        case ExprOp::Sentence:
          if (distance(doc, a, b, DistanceUnit::Sentence) == 0) consider(1.0, a);
          break;
        case ExprOp::Paragraph:
          if (distance(doc, a, b, DistanceUnit::Paragraph) == 0) consider(1.0, a);
          break;
        case ExprOp::Precedes:
          if (a.start < b.start) consider(1.0, a);
          break;
        case ExprOp::Within:
          if (distance(doc, a, b, DistanceUnit::Word) <= e.window) consider(1.0, a);
          break;
        default:
          break;
      }
      if (best.value >= 1.0) return best;
    }
  }
  return best;
}

double evaluate(const TextExpr& e, const EvalEnv& env, TraceNode* node);

template <class Fold>
double fold_args(const TextExpr& e, const EvalEnv& env, TraceNode* node, Fold fold) {
  std::vector<double> values;
  values.reserve(e.args.size());
  for (const auto& a : e.args) {
    if (node) {
      node->children.emplace_back();
      values.push_back(evaluate(a, env, &node->children.back()));
    } else {
      values.push_back(evaluate(a, env, nullptr));
    }
  }
  return fold(values);
}

double evaluate(const TextExpr& e, const EvalEnv& env, TraceNode* node) {
  double v = 0.0;
  std::optional<std::size_t> at;
  std::string_view combiner;

  switch (e.op) {
    case ExprOp::Literal: {
      auto occ = occurrences(*env.document, e.words);
      v = occ.empty() ? 0.0 : 1.0;
      if (!occ.empty()) at = occ.front().start;
      combiner = "literal";
      break;
    }
    case ExprOp::Phrase: {
      auto occ = occurrences(*env.document, phrase_words(e));
      v = occ.empty() ? 0.0 : 1.0;
      if (!occ.empty()) at = occ.front().start;
      combiner = "phrase";
      break;
    }
    case ExprOp::Concept:
      if (node && env.concept_trace) {
        *node = env.concept_trace(e.name);
        return node->value;
      }
      v = env.concept_value(e.name);
      combiner = "concept";
      break;
    case ExprOp::And:
      v = fold_args(e, env, node, [](const auto& xs) { return combine_min(xs); });
      combiner = "min";
      break;
    case ExprOp::Or:
    case ExprOp::BestOf:
      v = fold_args(e, env, node, [](const auto& xs) { return combine_max(xs); });
      combiner = "max";
      break;
    case ExprOp::WeightOf:
      v = fold_args(e, env, node, [](const auto& xs) { return combine_mean(xs); });
      combiner = "mean";
      break;
    case ExprOp::Not:
      v = fold_args(e, env, node, [](const auto& xs) { return 1.0 - xs.front(); });
      combiner = "complement";
      break;
    default: {
      auto r = eval_pairwise(e, env);
      v = r.value;
      at = r.at;
      combiner = op_name(e.op);
      break;
    }
  }

  if (node) {
    node->kind = e.op == ExprOp::Concept ? TraceNode::Kind::Concept : TraceNode::Kind::Expr;
    node->subject = render(e);
    node->combiner = to_lower(combiner);
    node->score = node->value = v;
    node->first_match = at;
  }
  return v;
}

}  // namespace

double eval_expr(const TextExpr& e, const EvalEnv& env) { return evaluate(e, env, nullptr); }

TraceNode trace_expr(const TextExpr& e, const EvalEnv& env) {
  TraceNode node;
  evaluate(e, env, &node);
  return node;
}

}  // namespace rubric
