#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rubric::sexpr {

// Node of a parenthesized rule file. Symbols keep their original spelling;
// callers decide whether to fold case.
struct Node {
  enum class Kind { Symbol, String, List };

  Kind kind = Kind::Symbol;
  std::string text;
  std::vector<Node> items;
  int line = 0;

  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_string() const { return kind == Kind::String; }
  bool is_list() const { return kind == Kind::List; }
};

/// Reads every top-level form. `;` starts a comment that runs to end of line.
/// Throws ParseError on unbalanced parentheses or unterminated strings.
std::vector<Node> read_all(std::string_view source);

}  // namespace rubric::sexpr
