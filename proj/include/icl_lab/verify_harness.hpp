#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "icl_lab/bounds_calc.hpp"
#include "icl_lab/classify.hpp"
#include "icl_lab/dist_core.hpp"
#include "icl_lab/icl_sim.hpp"

namespace icl_lab {

enum class ExperimentKind { textgen, bounded_textgen, coreset, knn, subset_penalty };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::textgen;
  BoundParams params;
  BoundMode mode = BoundMode::exact;  // textgen only
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  EtaModel eta;
  std::uint64_t eval_points = 10'000;
  std::string output_path;

  // Ground-truth generation.
  double concentration = 1.0;        // Dirichlet concentration for text tasks
  std::uint64_t dataset_size = 2000;  // N for classification tasks
  double cluster_mean = 1.0;          // cluster centers at +-cluster_mean * u
  double noise_scale = 1.0;           // isotropic Gaussian noise around the centers
  std::size_t explosion_limit = kDefaultExplosionLimit;

  /// Replaces the calculator's sample count (n_i, k, or coreset size).
  std::optional<std::uint64_t> samples_override;
  /// Coreset sizes, k values, or subset sizes to sweep. Empty means no sweep
  /// except for subset_penalty, which defaults to {100, 1000, 10000, 100000}.
  std::vector<std::uint64_t> sweep;
  CoresetStrategy coreset_strategy = CoresetStrategy::uniform;
  TrainConfig train{1.0, 3000, 1e-7, 1e-4};  // full model and coreset model
  TrainConfig local_train{4.0, 500, 1e-6, 1e-2};  // k-NN local models

  /// Worker threads; 0 means hardware concurrency. Capped by ICL_LAB_THREADS.
  /// Not part of the report: results are identical for every value.
  std::size_t threads = 0;

  void validate() const;
};

struct TrialResult {
  std::uint64_t trial_index = 0;
  double sup_error = 0.0;
  bool failed = false;
  std::string reason;               // set when the trial could not be evaluated
  std::vector<double> sweep_errors;  // one per sweep value
};

struct SweepSummary {
  std::string parameter;
  std::vector<std::uint64_t> values;
  std::vector<double> median_error;
  std::optional<double> loglog_slope;
};

struct BoundReport {
  ExperimentConfig config;
  BoundResult bound;          // resolved sample count and formula
  std::uint64_t samples = 0;  // count actually used per context / query / coreset
  double threshold = 0.0;     // epsilon + 2 eta
  double failure_rate = 0.0;
  double delta_target = 0.0;
  double ci_halfwidth = 0.0;
  bool pass = false;
  std::vector<TrialResult> trials;
  std::optional<SweepSummary> sweep;
  std::vector<std::string> notes;
};

// Synthetic classification data: y ~ Bernoulli(1/2), x = (2y - 1) mu u + sigma z
// with z standard normal and u a random unit direction. The Bayes posterior is
// exactly logistic with w* = 2 mu u / sigma^2 and b* = 0.
struct PlantedTask {
  LabeledDataset data;
  LinearModel planted;
  std::vector<double> direction;
};

PlantedTask planted_linear_task(std::size_t n, std::size_t dim, double cluster_mean, double noise_scale,
                                Rng& rng);
std::vector<std::vector<double>> planted_inputs(std::size_t n, const std::vector<double>& direction,
                                                double cluster_mean, double noise_scale, Rng& rng);

/// Random stream of one trial. Every experiment kind draws trial i from the
/// same stream, so e.g. bounded_textgen with l = 1 replays textgen exactly.
Rng trial_stream(std::uint64_t seed, std::uint64_t trial);

double median(std::vector<double> values);
/// Least-squares slope of log(y) against log(x); nullopt if any y <= 0.
std::optional<double> loglog_slope(std::span<const std::uint64_t> x, std::span<const double> y);

/// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);
std::size_t resolve_threads(std::size_t requested);

BoundReport run_textgen_experiment(const ExperimentConfig& cfg);
BoundReport run_bounded_textgen_experiment(const ExperimentConfig& cfg);
BoundReport run_coreset_experiment(const ExperimentConfig& cfg);
BoundReport run_knn_experiment(const ExperimentConfig& cfg);
BoundReport run_subset_penalty_experiment(const ExperimentConfig& cfg);
BoundReport run_experiment(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

nlohmann::json report_to_json(const BoundReport& report);
std::string report_to_csv(const BoundReport& report);
/// Path of the CSV written next to a JSON report (extension replaced by .csv).
std::string csv_path_for(const std::string& json_path);
/// Writes JSON to `path` and CSV to csv_path_for(path). Throws IoError.
void write_report(const BoundReport& report, const std::string& path);

}  // namespace icl_lab
