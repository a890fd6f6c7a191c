#include "rubric/retrieval.hpp"

#include "rubric/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace rubric {

std::vector<ScoredDocument> score_all(std::string_view concept_name, const Corpus& corpus,
                                      const RuleBase& rb, const CombinerRegistry& reg,
                                      const ProximityConfig& prox) {
  Engine engine(rb, reg, prox);
  std::vector<ScoredDocument> scores;
  scores.reserve(corpus.size());
  for (const auto& d : corpus.documents())
    scores.push_back({d.id(), engine.value(concept_name, d)});
  return scores;
}

void rank(std::vector<ScoredDocument>& docs) {
  std::sort(docs.begin(), docs.end(), [](const ScoredDocument& a, const ScoredDocument& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
}

RetrievalResult query(std::string_view concept_name, const Corpus& corpus, const RuleBase& rb,
                      const CombinerRegistry& reg, const ProximityConfig& prox,
                      double threshold) {
  if (!rb.has_concept(concept_name)) throw Error("unknown concept: " + std::string(concept_name));
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("threshold outside [0,1]");

  RetrievalResult result{std::string(concept_name), {}, threshold};
  for (auto& s : score_all(concept_name, corpus, rb, reg, prox))
    if (s.score > threshold) result.entries.push_back(std::move(s));
  rank(result.entries);
  return result;
}

Effectiveness effectiveness(const RetrievalResult& result, const Judgments& judgments) {
  Effectiveness e;
  std::set<std::string> retrieved;
  for (const auto& s : result.entries) retrieved.insert(s.doc_id);
  e.retrieved = retrieved.size();
  e.relevant = judgments.relevant.size();
  for (const auto& id : retrieved) e.intersection += judgments.relevant.count(id);
  if (e.relevant > 0)
    e.recall = static_cast<double>(e.intersection) / static_cast<double>(e.relevant);
  if (e.retrieved > 0)
    e.precision = static_cast<double>(e.intersection) / static_cast<double>(e.retrieved);
  return e;
}

Judgments parse_judgments(std::string_view text) {
  Judgments j;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    j.relevant.insert(line.substr(first, last - first + 1));
  }
  return j;
}

Judgments load_judgments(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read judgments: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_judgments(buf.str());
}

std::size_t count_inversions(const std::vector<ScoredDocument>& a,
                             const std::vector<ScoredDocument>& b) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < b.size(); ++i) pos[b[i].doc_id] = i;
  std::vector<std::size_t> order;
  for (const auto& d : a) order.push_back(pos.at(d.doc_id));
  std::size_t n = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) n += order[i] > order[j];
  return n;
}

SensitivityReport sensitivity(RuleId rule, const std::vector<double>& grid,
                              std::string_view concept_name, const Corpus& corpus,
                              const RuleBase& rb, const CombinerRegistry& reg,
                              const ProximityConfig& prox, double threshold,
                              std::optional<std::size_t> top_k) {
  if (rule >= rb.size()) throw Error("no rule with id " + std::to_string(rule));
  auto base_weight = rb.rule(rule).weight();
  if (!base_weight)
    throw Error("rule " + std::to_string(rule) + " is not an EVIDENCE or IMPLIES rule");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw Error("grid value outside [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error("grid is not strictly increasing");
  }
  if (!rb.has_concept(concept_name)) throw Error("unknown concept: " + std::string(concept_name));

  SensitivityReport report{rule, *base_weight, grid, {}};
  auto baseline = score_all(concept_name, corpus, rb, reg, prox);
  rank(baseline);

  for (double w : grid) {
    RuleBase varied = rb.with_weight(rule, w);
    auto scores = score_all(concept_name, corpus, varied, reg, prox);
    rank(scores);
    SensitivityPoint point{w, {}, count_inversions(baseline, scores)};
    for (const auto& s : scores) {
      if (s.score <= threshold) continue;
      if (top_k && point.top.size() >= *top_k) break;
      point.top.push_back(s);
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

}  // namespace rubric
