#include "rubric/corpus.hpp"

#include "rubric/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace rubric {

namespace {

enum class CharClass { Word, Apostrophe, SentenceEnd, Space, Newline, Other };

struct Scanned {
  CharClass cls;
  std::size_t width;  // bytes consumed
};

// Classifies the (possibly multi-byte) character at `pos`.
Scanned classify(std::string_view text, std::size_t pos) {
  auto c = static_cast<unsigned char>(text[pos]);
  if (c < 0x80) {
    if (std::isalnum(c)) return {CharClass::Word, 1};
    if (c == '\'') return {CharClass::Apostrophe, 1};
    if (c == '.' || c == '!' || c == '?') return {CharClass::SentenceEnd, 1};
    if (c == '\n') return {CharClass::Newline, 1};
    if (std::isspace(c)) return {CharClass::Space, 1};
    return {CharClass::Other, 1};
  }
  std::size_t width = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  width = std::min(width, text.size() - pos);
  // U+2000..U+206F general punctuation: E2 80 80 .. E2 81 AF
  if (width == 3 && c == 0xE2) {
    auto b1 = static_cast<unsigned char>(text[pos + 1]);
    auto b2 = static_cast<unsigned char>(text[pos + 2]);
    if (b1 == 0x80 && b2 == 0x99) return {CharClass::Apostrophe, 3};  // U+2019
    if (b1 == 0x80 || b1 == 0x81) return {CharClass::Other, 3};
  }
  // U+00A0 no-break space
  if (width == 2 && c == 0xC2 && static_cast<unsigned char>(text[pos + 1]) == 0xA0)
    return {CharClass::Space, 2};
  return {CharClass::Word, width};
}

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Word scanner shared by tokenize() and split_words(). Invokes `on_word`
// with each finished word and `on_break` for sentence/paragraph boundaries.
template <class OnWord, class OnBreak>
void scan(std::string_view text, OnWord on_word, OnBreak on_break) {
  std::string word;
  std::string pending_apostrophes;
  int newlines_since_word = 0;

  auto flush = [&] {
    if (!word.empty()) on_word(word);
    word.clear();
    pending_apostrophes.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto [cls, width] = classify(text, pos);
    std::string_view piece = text.substr(pos, width);
    switch (cls) {
      case CharClass::Word:
        word += pending_apostrophes;
        pending_apostrophes.clear();
        for (char c : piece) word.push_back(lower(c));
        newlines_since_word = 0;
        break;
      case CharClass::Apostrophe:
        if (!word.empty()) pending_apostrophes += '\'';
        break;
      case CharClass::SentenceEnd: {
        flush();
        std::size_t next = pos + width;
        if (next >= text.size() ||
            std::isspace(static_cast<unsigned char>(text[next])))
          on_break(false);
        break;
      }
      case CharClass::Newline:
        flush();
        if (++newlines_since_word == 2) on_break(true);
        break;
      case CharClass::Space:
        flush();
        break;
      case CharClass::Other:
        flush();
        break;
    }
    // Anything other than spaces between newlines resets the blank-line count.
    if (cls != CharClass::Newline && cls != CharClass::Space && cls != CharClass::Word)
      newlines_since_word = 0;
    pos += width;
  }
  flush();
}

}  // namespace

Document::Document(std::string doc_id, std::string raw, std::vector<Token> tokens)
    : id_(std::move(doc_id)), raw_(std::move(raw)), tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) index_[t.text].push_back(t.word_index);
}

std::span<const std::size_t> Document::positions(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return {};
  return it->second;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  scan(text, [&](const std::string& w) { words.push_back(w); }, [](bool) {});
  return words;
}

Document tokenize(std::string doc_id, std::string raw) {
  std::vector<Token> tokens;
  std::size_t sentence = 0;
  std::size_t paragraph = 0;
  bool sentence_break = false;
  bool paragraph_break = false;
  bool sentence_has_words = false;
  bool paragraph_has_words = false;

  scan(
      raw,
      [&](const std::string& w) {
        if (paragraph_break && paragraph_has_words) {
          ++paragraph;
          paragraph_has_words = false;
          sentence_break = true;
        }
        if (sentence_break && sentence_has_words) {
          ++sentence;
          sentence_has_words = false;
        }
        sentence_break = paragraph_break = false;
        tokens.push_back(Token{w, tokens.size(), sentence, paragraph});
        sentence_has_words = paragraph_has_words = true;
      },
      [&](bool is_paragraph) {
        if (is_paragraph)
          paragraph_break = true;
        else
          sentence_break = true;
      });

  return Document(std::move(doc_id), std::move(raw), std::move(tokens));
}

std::vector<PatternOccurrence> occurrences(const Document& doc,
                                           std::span<const std::string> pattern) {
  std::vector<PatternOccurrence> found;
  if (pattern.empty()) return found;
  const auto& tokens = doc.tokens();
  for (std::size_t start : doc.positions(pattern.front())) {
    if (start + pattern.size() > tokens.size()) break;
    bool match = true;
    for (std::size_t k = 1; k < pattern.size() && match; ++k)
      match = tokens[start + k].text == pattern[k];
    if (match) found.push_back({start, pattern.size()});
  }
  return found;
}

std::size_t distance(const Document& doc, const PatternOccurrence& a,
                     const PatternOccurrence& b, DistanceUnit unit) {
  auto diff = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
  const auto& ta = doc.tokens()[a.start];
  const auto& tb = doc.tokens()[b.start];
  switch (unit) {
    case DistanceUnit::Word:
      return diff(a.start, b.start);
    case DistanceUnit::Sentence:
      return diff(ta.sentence_index, tb.sentence_index);
    case DistanceUnit::Paragraph:
      return diff(ta.paragraph_index, tb.paragraph_index);
  }
  return 0;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::sort(documents_.begin(), documents_.end(),
            [](const Document& a, const Document& b) { return a.id() < b.id(); });
  std::map<std::string, std::string> folded;
  for (const auto& d : documents_) {
    std::string key = d.id();
    std::transform(key.begin(), key.end(), key.begin(), lower);
    auto [it, inserted] = folded.emplace(key, d.id());
    if (!inserted)
      throw Error("duplicate document id: '" + it->second + "' and '" + d.id() + "'");
  }
}

const Document* Corpus::find(std::string_view doc_id) const {
  auto it = std::lower_bound(
      documents_.begin(), documents_.end(), doc_id,
      [](const Document& d, std::string_view id) { return d.id() < id; });
  if (it == documents_.end() || it->id() != doc_id) return nullptr;
  return &*it;
}

Document load_document(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read document: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read document: " + file.string());
  return tokenize(file.stem().string(), buf.str());
}

Corpus load_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw IoError("cannot read corpus directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (std::filesystem::directory_iterator it(dir, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (it->path().extension() == ".txt" && !it->is_directory())
      files.push_back(it->path());
  }
  if (ec) throw IoError("cannot read corpus directory: " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  docs.reserve(files.size());
  for (const auto& f : files) docs.push_back(load_document(f));
  return Corpus(std::move(docs));
}

}  // namespace rubric
