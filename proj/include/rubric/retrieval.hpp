#pragma once

#include "rubric/combiners.hpp"
#include "rubric/corpus.hpp"
#include "rubric/inference.hpp"
#include "rubric/rulebase.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rubric {

struct ScoredDocument {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDocument&, const ScoredDocument&) = default;
};

/// Documents scoring strictly above `threshold`, best first, ties by id.
struct RetrievalResult {
  std::string concept_name;
  std::vector<ScoredDocument> entries;
  double threshold = 0.0;
};

struct Judgments {
  std::set<std::string> relevant;
};

struct Effectiveness {
  double recall = 1.0;
  double precision = 1.0;
  std::size_t retrieved = 0;
  std::size_t relevant = 0;
  std::size_t intersection = 0;
};

/// Score of every document for `concept`, in corpus (doc id) order.
std::vector<ScoredDocument> score_all(std::string_view concept_name, const Corpus& corpus,
                                      const RuleBase& rb, const CombinerRegistry& reg,
                                      const ProximityConfig& prox);

/// Sorts by score descending, ties by doc id ascending.
void rank(std::vector<ScoredDocument>& docs);

/// Throws rubric::Error if `concept` is not named in `rb` or the threshold
/// lies outside [0,1].
RetrievalResult query(std::string_view concept_name, const Corpus& corpus, const RuleBase& rb,
                      const CombinerRegistry& reg, const ProximityConfig& prox,
                      double threshold = 0.0);

Effectiveness effectiveness(const RetrievalResult& result, const Judgments& judgments);

/// One doc id per line; blank lines and `#` comments ignored.
Judgments parse_judgments(std::string_view text);
Judgments load_judgments(const std::filesystem::path& file);

struct SensitivityPoint {
  double weight = 0.0;
  std::vector<ScoredDocument> top;  // thresholded, truncated to K
  std::size_t inversions = 0;       // discordant pairs vs. the baseline ranking
};

struct SensitivityReport {
  RuleId rule = 0;
  double baseline_weight = 0.0;
  std::vector<double> grid;
  std::vector<SensitivityPoint> points;
};

/// Re-runs `query` with rule `rule`'s weight set to each grid value. The
/// inversion count compares full-corpus rankings against the unmodified
/// rulebase. Throws rubric::Error for unweighted rules or a grid that is not
/// strictly increasing inside [0,1].
SensitivityReport sensitivity(RuleId rule, const std::vector<double>& grid,
                              std::string_view concept_name, const Corpus& corpus,
                              const RuleBase& rb, const CombinerRegistry& reg,
                              const ProximityConfig& prox, double threshold = 0.0,
                              std::optional<std::size_t> top_k = std::nullopt);

/// Number of document pairs ordered differently in `a` and `b` (same docs).
std::size_t count_inversions(const std::vector<ScoredDocument>& a,
                             const std::vector<ScoredDocument>& b);

}  // namespace rubric
