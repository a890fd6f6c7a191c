#include "rubric/sexpr.hpp"

#include "rubric/error.hpp"

#include <cctype>

namespace rubric {

namespace {

std::string render(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) return "parse error";
  const auto& first = diagnostics.front();
  std::string msg = "line " + std::to_string(first.line) + ": " + first.message;
  if (diagnostics.size() > 1)
    msg += " (and " + std::to_string(diagnostics.size() - 1) + " more)";
  return msg;
}

}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error(render(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace sexpr {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  std::vector<Node> read_all() {
    std::vector<Node> forms;
    for (;;) {
      skip_blank();
      if (pos_ >= src_.size()) break;
      if (src_[pos_] == ')') fail(line_, "unbalanced parentheses: unexpected ')'");
      forms.push_back(read());
    }
    return forms;
  }

 private:
  [[noreturn]] void fail(int line, std::string message) {
    throw ParseError({Diagnostic{line, std::move(message)}});
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Node read() {
    skip_blank();
    Node node;
    node.line = line_;
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      node.kind = Node::Kind::List;
      for (;;) {
        skip_blank();
        if (pos_ >= src_.size())
          fail(node.line, "unbalanced parentheses: '(' is never closed");
        if (src_[pos_] == ')') {
          ++pos_;
          break;
        }
        node.items.push_back(read());
      }
    } else if (c == '"') {
      ++pos_;
      node.kind = Node::Kind::String;
      for (;;) {
        if (pos_ >= src_.size()) fail(node.line, "unterminated string");
        char s = src_[pos_++];
        if (s == '"') break;
        if (s == '\\' && pos_ < src_.size()) s = src_[pos_++];
        if (s == '\n') ++line_;
        node.text.push_back(s);
      }
    } else {
      node.kind = Node::Kind::Symbol;
      while (pos_ < src_.size()) {
        char s = src_[pos_];
        if (std::isspace(static_cast<unsigned char>(s)) || s == '(' || s == ')' ||
            s == '"' || s == ';')
          break;
        node.text.push_back(s);
        ++pos_;
      }
    }
    return node;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::vector<Node> read_all(std::string_view source) { return Reader(source).read_all(); }

}  // namespace sexpr
}  // namespace rubric
