#pragma once

#include "rubric/corpus.hpp"
#include "rubric/rulebase.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace rubric::testing {

inline std::filesystem::path data_dir() { return RUBRIC_TEST_DATA; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline RuleBase meetings_rules() { return parse_rulebase(read_file(data_dir() / "meetings.rubric")); }
inline Corpus meetings_corpus() { return load_corpus(data_dir() / "meetings"); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rubric-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace rubric::testing
