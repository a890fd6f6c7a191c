#include "cli.hpp"

#include "rubric/error.hpp"
#include "rubric/inference.hpp"
#include "rubric/names.hpp"
#include "rubric/retrieval.hpp"
#include "rubric/rulebase.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rubric::cli {

namespace {

struct Options {
  std::string rules;
  std::string corpus;
  std::string document;
  std::string concept_name;
  double threshold = 0.0;
  std::optional<std::size_t> top;
  bool json = false;
  bool full = false;
  ProximityConfig prox;
  std::string relevant;
  RuleId rule = 0;
  std::string grid;
};

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string read_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + std::string(what) + ": " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string issue_line(std::string_view level, const ValidationIssue& i) {
  std::string s(level);
  if (i.rule) s += ": rule " + std::to_string(*i.rule);
  return s + ": " + i.message;
}

// Parses and validates; domain errors are reported to `err`.
RuleBase load_rules(const std::string& path, const CombinerRegistry& reg, std::ostream& err) {
  RuleBase rb = parse_rulebase(read_file(path, "rule file"));
  auto report = validate(rb, reg);
  if (!report.ok()) {
    for (const auto& e : report.errors) err << issue_line("error", e) << "\n";
    throw Error(path + ": rule base has " + std::to_string(report.errors.size()) +
                " validation error(s)");
  }
  return rb;
}

void check_concept(const RuleBase& rb, const std::string& concept_name) {
  if (!rb.has_concept(concept_name)) throw Error("unknown concept: " + concept_name);
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  RuleBase rb;
  try {
    rb = parse_rulebase(read_file(o.rules, "rule file"));
  } catch (const ParseError& e) {
    for (const auto& d : e.diagnostics())
      out << "error: line " << d.line << ": " << d.message << "\n";
    err << o.rules << ": parse failed\n";
    return kDomainError;
  }
  auto report = validate(rb);
  for (const auto& e : report.errors) out << issue_line("error", e) << "\n";
  for (const auto& w : report.warnings) out << issue_line("warning", w) << "\n";
  out << rb.size() << " rules, " << report.errors.size() << " errors, "
      << report.warnings.size() << " warnings\n";
  return report.ok() ? kOk : kDomainError;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err) {
  CombinerRegistry reg;
  RuleBase rb = load_rules(o.rules, reg, err);
  check_concept(rb, o.concept_name);
  Corpus corpus = load_corpus(o.corpus);
  auto result = query(o.concept_name, corpus, rb, reg, o.prox, o.threshold);
  if (o.top && result.entries.size() > *o.top) result.entries.resize(*o.top);

  if (o.json) {
    auto arr = nlohmann::json::array();
    for (const auto& e : result.entries)
      arr.push_back({{"doc", e.doc_id}, {"score", std::round(e.score * 1e6) / 1e6}});
    out << arr.dump() << "\n";
  } else {
    for (const auto& e : result.entries) out << e.doc_id << "\t" << fixed6(e.score) << "\n";
  }
  return kOk;
}

int cmd_explain(const Options& o, std::ostream& out, std::ostream& err) {
  CombinerRegistry reg;
  RuleBase rb = load_rules(o.rules, reg, err);
  check_concept(rb, o.concept_name);
  Document doc = load_document(o.document);
  auto [value, trace] = evaluate_concept(o.concept_name, doc, rb, reg, o.prox);
  out << explain(trace, ExplainOptions{o.full});
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  CombinerRegistry reg;
  RuleBase rb = load_rules(o.rules, reg, err);
  check_concept(rb, o.concept_name);
  Judgments judgments = load_judgments(o.relevant);
  Corpus corpus = load_corpus(o.corpus);
  for (const auto& id : judgments.relevant)
    if (!corpus.find(id)) err << "warning: judged document '" << id << "' is not in the corpus\n";
  auto result = query(o.concept_name, corpus, rb, reg, o.prox, o.threshold);
  auto e = effectiveness(result, judgments);
  out << "recall " << fixed6(e.recall) << " precision " << fixed6(e.precision) << "\n";
  out << "retrieved " << e.retrieved << " relevant " << e.relevant << " intersection "
      << e.intersection << "\n";
  return kOk;
}

int cmd_sensitivity(const Options& o, std::ostream& out, std::ostream& err) {
  auto grid = parse_grid(o.grid);
  if (!grid) {
    err << "invalid grid spec '" << o.grid << "' (expected start:stop:step within [0,1])\n";
    return kDomainError;
  }
  CombinerRegistry reg;
  RuleBase rb = load_rules(o.rules, reg, err);
  check_concept(rb, o.concept_name);
  if (o.rule >= rb.size() || !rb.rule(o.rule).weight())
    throw Error("rule " + std::to_string(o.rule) + " is not an EVIDENCE or IMPLIES rule");
  Corpus corpus = load_corpus(o.corpus);
  auto report = sensitivity(o.rule, *grid, o.concept_name, corpus, rb, reg, o.prox, o.threshold, o.top);

  out << "rule " << report.rule << " baseline " << fixed6(report.baseline_weight) << "\n";
  for (const auto& p : report.points) {
    out << "weight " << fixed6(p.weight) << " inversions " << p.inversions << "\n";
    for (const auto& e : p.top) out << "  " << e.doc_id << "\t" << fixed6(e.score) << "\n";
  }
  return kOk;
}

void add_proximity(CLI::App* cmd, Options& o) {
  cmd->add_option("--near-w", o.prox.window_words, "NEAR-W window in words")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--near-s", o.prox.window_sentences, "NEAR-S window in sentences")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--near-p", o.prox.window_paragraphs, "NEAR-P window in paragraphs")
      ->check(CLI::PositiveNumber);
}

}  // namespace

std::optional<std::vector<double>> parse_grid(std::string_view spec) {
  double v[3];
  std::string s(spec);
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    auto colon = s.find(':', pos);
    if ((i < 2) != (colon != std::string::npos)) return std::nullopt;
    std::string part = s.substr(pos, i < 2 ? colon - pos : std::string::npos);
    std::size_t used = 0;
    try {
      v[i] = std::stod(part, &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (used != part.size() || !std::isfinite(v[i])) return std::nullopt;
    pos = colon + 1;
  }
  const double start = v[0], stop = v[1], step = v[2];
  if (!(start >= 0.0 && start <= stop && stop <= 1.0 && step > 0.0)) return std::nullopt;

  auto snap = [](double x) { return std::round(x * 1e12) / 1e12; };
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    double x = snap(start + static_cast<double>(i) * step);
    if (x > stop + 1e-12) break;
    grid.push_back(std::min(x, stop));
  }
  return grid;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-based concept retrieval over text corpora", "rubric"};
  app.require_subcommand(1);
  Options o;

  auto* validate_cmd = app.add_subcommand("validate", "Check a rule file");
  validate_cmd->add_option("rules", o.rules, "Rule file")->required();

  auto* query_cmd = app.add_subcommand("query", "Rank corpus documents for a concept");
  query_cmd->add_option("rules", o.rules)->required();
  query_cmd->add_option("corpus", o.corpus, "Directory of .txt documents")->required();
  query_cmd->add_option("concept", o.concept_name)->required();
  query_cmd->add_option("--threshold", o.threshold, "Retrieve scores strictly above this")
      ->check(CLI::Range(0.0, 1.0));
  query_cmd->add_option("--top", o.top, "Keep the best K")->check(CLI::PositiveNumber);
  query_cmd->add_flag("--json", o.json, "JSON output");
  add_proximity(query_cmd, o);

  auto* explain_cmd = app.add_subcommand("explain", "Show the evaluation trace for one document");
  explain_cmd->add_option("rules", o.rules)->required();
  explain_cmd->add_option("document", o.document, "Document file")->required();
  explain_cmd->add_option("concept", o.concept_name)->required();
  explain_cmd->add_flag("--full", o.full, "Include subtrees where nothing fired");
  add_proximity(explain_cmd, o);

  auto* eval_cmd = app.add_subcommand("eval", "Recall and precision against judgments");
  eval_cmd->add_option("rules", o.rules)->required();
  eval_cmd->add_option("corpus", o.corpus)->required();
  eval_cmd->add_option("concept", o.concept_name)->required();
  eval_cmd->add_option("--relevant", o.relevant, "Judgments file")->required();
  eval_cmd->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0));
  add_proximity(eval_cmd, o);

  auto* sens_cmd = app.add_subcommand("sensitivity", "Sweep one rule weight");
  sens_cmd->add_option("rules", o.rules)->required();
  sens_cmd->add_option("corpus", o.corpus)->required();
  sens_cmd->add_option("concept", o.concept_name)->required();
  sens_cmd->add_option("--rule", o.rule, "EVIDENCE or IMPLIES rule id")->required();
  sens_cmd->add_option("--grid", o.grid, "start:stop:step")->required();
  sens_cmd->add_option("--top", o.top)->check(CLI::PositiveNumber);
  sens_cmd->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0));
  add_proximity(sens_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kDomainError;
  }
  o.concept_name = to_lower(o.concept_name);

  try {
    if (validate_cmd->parsed()) return cmd_validate(o, out, err);
    if (query_cmd->parsed()) return cmd_query(o, out, err);
    if (explain_cmd->parsed()) return cmd_explain(o, out, err);
    if (eval_cmd->parsed()) return cmd_eval(o, out, err);
    if (sens_cmd->parsed()) return cmd_sensitivity(o, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kDomainError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"rubric"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rubric::cli
