#include "icl_lab/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "icl_lab/bounds_calc.hpp"
#include "icl_lab/errors.hpp"
#include "icl_lab/prompt_kit.hpp"
#include "icl_lab/verify_harness.hpp"

namespace icl_lab {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitParam = 1;
constexpr int kExitFailed = 2;
constexpr int kExitIo = 3;

struct BoundsArgs {
  std::string kind;
  std::optional<std::uint64_t> V, m, d, l, subset_size;
  std::optional<double> epsilon, delta;
  std::string mode = "bigo";
  double constant = 1.0;
};

struct VerifyArgs {
  std::string kind;
  std::string config_path;
  std::string output_path;
  std::size_t threads = 0;
};

struct PromptArgs {
  std::string pairs_path;
  std::optional<std::string> query;
  std::optional<std::string> separator;
  std::optional<std::string> joiner;
};

template <typename T>
T require(const std::optional<T>& value, const char* flag, const std::string& kind) {
  if (!value) throw ParameterError(std::string("missing required option ") + flag + " for kind " + kind);
  return *value;
}

int run_bounds(const BoundsArgs& a, std::ostream& out) {
  BoundParams p;
  p.constant = a.constant;
  json j;
  if (a.kind == "subset_penalty") {
    const auto n = require(a.subset_size, "--subset-size", a.kind);
    j = {{"kind", a.kind},
         {"subset_size", n},
         {"constant", a.constant},
         {"penalty", subset_penalty(n, a.constant)},
         {"formula_text", "penalty = c / sqrt(n)"}};
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  if (a.kind == "textgen") {
    p.V = require(a.V, "--V", a.kind);
    p.m = require(a.m, "--m", a.kind);
    p.epsilon = require(a.epsilon, "--epsilon", a.kind);
    p.delta = require(a.delta, "--delta", a.kind);
  } else if (a.kind == "coreset") {
    p.d = require(a.d, "--d", a.kind);
    p.epsilon = require(a.epsilon, "--epsilon", a.kind);
  } else if (a.kind == "knn") {
    p.epsilon = require(a.epsilon, "--epsilon", a.kind);
    p.delta = require(a.delta, "--delta", a.kind);
  } else if (a.kind == "bounded_textgen") {
    p.l = require(a.l, "--l", a.kind);
    p.V = require(a.V, "--V", a.kind);
    p.epsilon = require(a.epsilon, "--epsilon", a.kind);
    p.delta = require(a.delta, "--delta", a.kind);
    p.m = a.m.value_or(1);
  } else {
    throw ParameterError("unknown bound kind '" + a.kind +
                         "' (expected textgen, coreset, knn, bounded_textgen, subset_penalty)");
  }
  const BoundResult r = calculate(a.kind, p, parse_bound_mode(a.mode));
  j = {{"kind", a.kind},
       {"per_context", r.per_context},
       {"total", r.total},
       {"mode", to_string(r.mode)},
       {"raw_value", r.raw_value},
       {"formula_text", r.formula_text},
       {"params",
        {{"V", p.V}, {"m", p.m}, {"d", p.d}, {"l", p.l}, {"epsilon", p.epsilon}, {"delta", p.delta},
         {"constant", p.constant}}}};
  out << j.dump(2) << "\n";
  return kExitOk;
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_config(a.config_path);
  const ExperimentKind requested = parse_experiment_kind(a.kind);
  if (requested != cfg.kind) {
    throw ParameterError("config kind '" + std::string(to_string(cfg.kind)) + "' does not match subcommand '" +
                         a.kind + "'");
  }
  if (!a.output_path.empty()) cfg.output_path = a.output_path;
  if (a.threads != 0) cfg.threads = a.threads;
  const BoundReport report = run_experiment(cfg);
  if (!cfg.output_path.empty()) write_report(report, cfg.output_path);

  json summary = {{"kind", to_string(cfg.kind)},
                  {"failure_rate", report.failure_rate},
                  {"delta_target", report.delta_target},
                  {"ci_halfwidth", report.ci_halfwidth},
                  {"pass", report.pass}};
  if (report.sweep && report.sweep->loglog_slope) summary["loglog_slope"] = *report.sweep->loglog_slope;
  if (!cfg.output_path.empty()) summary["report"] = cfg.output_path;
  out << summary.dump(2) << "\n";
  return report.pass ? kExitOk : kExitFailed;
}

std::vector<ExamplePair> parse_pairs(const json& arr) {
  if (!arr.is_array()) throw ParameterError("pairs must be a JSON array");
  std::vector<ExamplePair> pairs;
  for (const auto& item : arr) {
    if (item.is_array() && item.size() == 2) {
      pairs.push_back({item[0].get<std::string>(), item[1].get<std::string>()});
    } else if (item.is_object()) {
      pairs.push_back({item.at("input").get<std::string>(), item.at("output").get<std::string>()});
    } else {
      throw ParameterError("each pair must be [input, output] or {\"input\": ..., \"output\": ...}");
    }
    if (pairs.back().input_text.empty()) throw ParameterError("pair inputs must be non-empty");
  }
  return pairs;
}

int run_prompt(const PromptArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.pairs_path);
  if (!in) throw IoError("cannot open pairs file '" + a.pairs_path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("pairs file '" + a.pairs_path + "' is not valid JSON: " + e.what());
  }

  PromptConfig cfg;
  std::vector<ExamplePair> pairs;
  std::optional<std::string> query = a.query;
  try {
    if (j.is_array()) {
      pairs = parse_pairs(j);
    } else if (j.is_object()) {
      pairs = parse_pairs(j.value("pairs", json::array()));
      if (!query && j.contains("query")) query = j.at("query").get<std::string>();
      cfg.separator = j.value("separator", cfg.separator);
      cfg.pair_joiner = j.value("pair_joiner", cfg.pair_joiner);
      cfg.trailing_separator_before_query =
          j.value("trailing_separator_before_query", cfg.trailing_separator_before_query);
    } else {
      throw ParameterError("pairs file must hold an array of pairs or an object with \"pairs\"");
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed pairs file: ") + e.what());
  }
  if (a.separator) cfg.separator = *a.separator;
  if (a.joiner) cfg.pair_joiner = *a.joiner;
  if (!query) throw ParameterError("missing required option --query (and no \"query\" in the pairs file)");

  for (const auto& w : separator_collisions(pairs, *query, cfg)) err << "warning: " << w << "\n";
  out << build_prompt(pairs, *query, cfg) << "\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"icl_lab: sample-size calculators, Monte Carlo bound checks, and prompt construction"};
  app.require_subcommand(1);

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Sample-size calculators");
  bounds_cmd->require_subcommand(1);
  auto* calc = bounds_cmd->add_subcommand("calc", "Evaluate one calculator and print a JSON BoundResult");
  calc->add_option("--kind", bounds.kind, "textgen | coreset | knn | bounded_textgen | subset_penalty")
      ->required();
  calc->add_option("--V", bounds.V, "Vocabulary size");
  calc->add_option("--m", bounds.m, "Number of contexts");
  calc->add_option("--d", bounds.d, "Input dimension");
  calc->add_option("--l", bounds.l, "Output length");
  calc->add_option("--epsilon", bounds.epsilon, "Error tolerance in (0, 2]");
  calc->add_option("--delta", bounds.delta, "Failure probability in (0, 1)");
  calc->add_option("--mode", bounds.mode, "exact | bigo (textgen only)");
  calc->add_option("--constant", bounds.constant, "Big-O constant multiplier");
  calc->add_option("--subset-size", bounds.subset_size, "Subset size (subset_penalty)");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run a Monte Carlo bound check");
  verify_cmd->add_option("kind", verify.kind, "textgen | bounded_textgen | coreset | knn | subset_penalty")
      ->required();
  verify_cmd->add_option("--config", verify.config_path, "Experiment config JSON")->required();
  verify_cmd->add_option("--output", verify.output_path, "Report path (JSON; CSV written alongside)");
  verify_cmd->add_option("--threads", verify.threads, "Worker threads (0 = all cores)");

  PromptArgs prompt;
  auto* prompt_cmd = app.add_subcommand("prompt", "Prompt construction");
  prompt_cmd->require_subcommand(1);
  auto* build = prompt_cmd->add_subcommand("build", "Build a few-shot prompt from a JSON pairs file");
  build->add_option("--pairs", prompt.pairs_path, "JSON file of pairs (and optionally the query)")->required();
  build->add_option("--query", prompt.query, "Query input");
  build->add_option("--separator", prompt.separator, "Separator token (default [SEP])");
  build->add_option("--joiner", prompt.joiner, "Joiner between fields (default a single space)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return kExitOk;
    err << app.help();
    return kExitParam;
  }

  try {
    if (calc->parsed()) return run_bounds(bounds, out);
    if (verify_cmd->parsed()) return run_verify(verify, out);
    if (build->parsed()) return run_prompt(prompt, out, err);
    err << app.help();
    return kExitParam;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitParam;
  }
}

}  // namespace icl_lab
