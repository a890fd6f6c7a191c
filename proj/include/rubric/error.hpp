#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rubric {

/// Raised for domain errors: unknown concepts, bad combiner names, ambiguous
/// inheritance, unweighted rules passed to a sweep.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures (unreadable rule file, corpus directory, judgments).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  int line = 0;
  std::string message;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace rubric
