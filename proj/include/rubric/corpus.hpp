#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rubric {

struct Token {
  std::string text;
  std::size_t word_index = 0;
  std::size_t sentence_index = 0;
  std::size_t paragraph_index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

/// A consecutive run of matched words, identified by its first word.
struct PatternOccurrence {
  std::size_t start = 0;
  std::size_t length = 1;

  friend bool operator==(const PatternOccurrence&, const PatternOccurrence&) = default;
};

enum class DistanceUnit { Word, Sentence, Paragraph };

class Document {
 public:
  Document() = default;
  Document(std::string doc_id, std::string raw, std::vector<Token> tokens);

  const std::string& id() const { return id_; }
  const std::string& raw() const { return raw_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  bool empty() const { return tokens_.empty(); }

  /// Word positions of `word` in ascending order (empty span when absent).
  std::span<const std::size_t> positions(std::string_view word) const;

 private:
  std::string id_;
  std::string raw_;
  std::vector<Token> tokens_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

/// Lowercased words of `text`: maximal runs of letters, digits and internal
/// apostrophes. Hyphens and other punctuation separate words.
std::vector<std::string> split_words(std::string_view text);

Document tokenize(std::string doc_id, std::string raw);

/// Every start index where `pattern` occurs consecutively; matches may overlap.
std::vector<PatternOccurrence> occurrences(const Document& doc,
                                           std::span<const std::string> pattern);

std::size_t distance(const Document& doc, const PatternOccurrence& a,
                     const PatternOccurrence& b, DistanceUnit unit);

class Corpus {
 public:
  Corpus() = default;
  /// Sorts by id; throws rubric::Error on duplicate ids.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document* find(std::string_view doc_id) const;

 private:
  std::vector<Document> documents_;
};

/// Reads a single file as a document whose id is the file stem.
Document load_document(const std::filesystem::path& file);

/// Every `*.txt` in `dir` (non-recursive). Throws IoError for unreadable
/// inputs, rubric::Error for ids colliding case-insensitively.
Corpus load_corpus(const std::filesystem::path& dir);

}  // namespace rubric
