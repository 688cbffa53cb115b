#include "icl_lab/verify_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "icl_lab/errors.hpp"

namespace icl_lab {

using nlohmann::json;

namespace {

const std::vector<std::uint64_t> kDefaultSubsetGrid = {100, 1000, 10000, 100000};

Rng trial_rng(const ExperimentConfig& cfg, std::uint64_t trial) { return trial_stream(cfg.seed, trial); }

double threshold_for(const ExperimentConfig& cfg) {
  return cfg.params.epsilon + 2.0 * cfg.eta.effective();
}

std::vector<TrialResult> run_trials(const ExperimentConfig& cfg,
                                    const std::function<TrialResult(std::uint64_t)>& trial) {
  std::vector<TrialResult> results(cfg.trials);
  parallel_for(cfg.trials, resolve_threads(cfg.threads), [&](std::size_t i) {
    results[i] = trial(i);
    results[i].trial_index = i;
  });
  return results;
}

void finalize(BoundReport& r, std::vector<TrialResult> trials) {
  r.trials = std::move(trials);
  r.threshold = threshold_for(r.config);
  std::uint64_t failures = 0;
  for (auto& t : r.trials) {
    if (t.reason.empty()) t.failed = t.sup_error > r.threshold;
    failures += t.failed ? 1 : 0;
  }
  const double n = static_cast<double>(r.trials.size());
  r.failure_rate = static_cast<double>(failures) / n;
  r.delta_target = r.config.params.delta;
  r.ci_halfwidth = 1.96 * std::sqrt(r.failure_rate * (1.0 - r.failure_rate) / n);
  r.pass = r.failure_rate <= r.delta_target + r.ci_halfwidth;
  r.notes.push_back(
      "a trial fails when its error exceeds epsilon + 2*eta; the uniform-mix oracle moves a "
      "distribution by at most 2*eta in L1");
  r.notes.push_back("pass iff failure_rate <= delta + 1.96*sqrt(r(1-r)/trials)");
  if (r.config.mode == BoundMode::big_o || r.config.kind != ExperimentKind::textgen) {
    r.notes.push_back("big-O constants are a calibration choice, not derived values; constant = " +
                      std::to_string(r.config.params.constant));
  }
}

void summarize_sweep(BoundReport& r, std::string parameter, const std::vector<std::uint64_t>& values) {
  if (values.empty()) return;
  SweepSummary s;
  s.parameter = std::move(parameter);
  s.values = values;
  for (std::size_t j = 0; j < values.size(); ++j) {
    std::vector<double> column;
    for (const auto& t : r.trials) {
      if (j < t.sweep_errors.size()) column.push_back(t.sweep_errors[j]);
    }
    s.median_error.push_back(column.empty() ? std::nan("") : median(std::move(column)));
  }
  s.loglog_slope = loglog_slope(s.values, s.median_error);
  if (!s.loglog_slope) r.notes.push_back("log-log slope undefined: a median error is zero or missing");
  r.sweep = std::move(s);
}

std::uint64_t clamp_to(std::uint64_t value, std::uint64_t upper, const char* what, BoundReport& r) {
  if (value <= upper) return value;
  r.notes.push_back(std::string(what) + " " + std::to_string(value) + " clamped to dataset size " +
                    std::to_string(upper));
  return upper;
}

// sup over contexts of the L1 error between oracle and truth, one task per trial.
TrialResult textgen_trial(const ExperimentConfig& cfg, std::uint64_t n, std::uint64_t trial) {
  Rng rng = trial_rng(cfg, trial);
  const SyntheticTask task = random_task(cfg.params.V, cfg.params.m, cfg.concentration, rng);
  IclPromptSamples prompt;
  for (const auto& c : task.contexts) prompt.per_context[c.id] = sample_tokens(task.dists[c.id], n, rng);
  TrialResult t;
  for (const auto& c : task.contexts) {
    const auto oracle = icl_textgen_dist(prompt, c, task.vocab, cfg.eta);
    t.sup_error = std::max(t.sup_error, l1_distance(oracle, task.dists[c.id]));
  }
  return t;
}

TrialResult bounded_textgen_trial(const ExperimentConfig& cfg, std::size_t space, std::uint64_t k,
                                  std::uint64_t trial) {
  Rng rng = trial_rng(cfg, trial);
  const std::size_t length = cfg.params.l;
  // Ground truth is a joint distribution over all V^l sequences per context.
  const SyntheticTask joint = random_task(space, cfg.params.m, cfg.concentration, rng);
  const Vocabulary vocab = Vocabulary::with_size(cfg.params.V);
  const SequenceDistribution codec{cfg.params.V, length, CategoricalDistribution::uniform(space)};

  IclPromptSamples prompt;
  for (const auto& c : joint.contexts) {
    auto& seqs = prompt.sequences[c.id];
    for (TokenIndex idx : sample_tokens(joint.dists[c.id], k, rng)) seqs.push_back(codec.decode(idx));
  }
  TrialResult t;
  for (const auto& c : joint.contexts) {
    const auto oracle = icl_sequence_dist(prompt, c, vocab, length, cfg.eta, cfg.explosion_limit);
    t.sup_error = std::max(t.sup_error, l1_distance(oracle.joint, joint.dists[c.id]));
  }
  return t;
}

}  // namespace

Rng trial_stream(std::uint64_t seed, std::uint64_t trial) { return Rng::derive(seed, trial); }

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::textgen: return "textgen";
    case ExperimentKind::bounded_textgen: return "bounded_textgen";
    case ExperimentKind::coreset: return "coreset";
    case ExperimentKind::knn: return "knn";
    case ExperimentKind::subset_penalty: return "subset_penalty";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::textgen, ExperimentKind::bounded_textgen, ExperimentKind::coreset,
                 ExperimentKind::knn, ExperimentKind::subset_penalty}) {
    if (text == to_string(k)) return k;
  }
  throw ParameterError("unknown experiment kind '" + std::string(text) +
                       "' (expected textgen, bounded_textgen, coreset, knn, subset_penalty)");
}

void ExperimentConfig::validate() const {
  params.validate();
  eta.validate();
  train.validate();
  local_train.validate();
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (eval_points < 1 && (kind == ExperimentKind::coreset || kind == ExperimentKind::knn)) {
    throw ParameterError("eval_points must be at least 1");
  }
  if (!(concentration > 0.0)) throw ParameterError("concentration must be positive");
  if (dataset_size < 1) throw ParameterError("dataset_size must be at least 1");
  if (!(noise_scale > 0.0)) throw ParameterError("noise_scale must be positive");
  if (samples_override && *samples_override < 1) throw ParameterError("samples_override must be at least 1");
  for (auto v : sweep) {
    if (v < 1) throw ParameterError("sweep values must be at least 1");
  }
  if ((kind == ExperimentKind::textgen || kind == ExperimentKind::subset_penalty) && params.V < 2) {
    throw ParameterError("V must be at least 2");
  }
}

PlantedTask planted_linear_task(std::size_t n, std::size_t dim, double cluster_mean, double noise_scale,
                                Rng& rng) {
  std::vector<double> u(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : u) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : u) x /= norm;

  std::vector<LabeledPoint> points(n);
  for (auto& p : points) {
    p.y = rng.uniform() < 0.5 ? 0 : 1;
    const double s = p.y == 1 ? 1.0 : -1.0;
    p.x.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) p.x[j] = s * cluster_mean * u[j] + noise_scale * rng.normal();
  }
  LinearModel planted{std::vector<double>(dim), 0.0};
  const double scale = 2.0 * cluster_mean / (noise_scale * noise_scale);
  for (std::size_t j = 0; j < dim; ++j) planted.w[j] = scale * u[j];
  return PlantedTask{LabeledDataset(dim, std::move(points)), std::move(planted), std::move(u)};
}

std::vector<std::vector<double>> planted_inputs(std::size_t n, const std::vector<double>& direction,
                                                double cluster_mean, double noise_scale, Rng& rng) {
  std::vector<std::vector<double>> xs(n, std::vector<double>(direction.size()));
  for (auto& x : xs) {
    const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = s * cluster_mean * direction[j] + noise_scale * rng.normal();
  }
  return xs;
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::optional<double> loglog_slope(std::span<const std::uint64_t> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || x[i] == 0) return std::nullopt;
    const double lx = std::log(static_cast<double>(x[i]));
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ICL_LAB_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return n;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

BoundReport run_textgen_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::textgen) throw ParameterError("config kind is not textgen");
  BoundReport r;
  r.config = cfg;
  r.bound = textgen_samples_per_context(cfg.params, cfg.mode);
  r.samples = cfg.samples_override.value_or(r.bound.per_context);
  if (cfg.samples_override) r.notes.push_back("per-context sample count overridden by config");
  finalize(r, run_trials(cfg, [&](std::uint64_t i) { return textgen_trial(cfg, r.samples, i); }));
  return r;
}

BoundReport run_bounded_textgen_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::bounded_textgen) throw ParameterError("config kind is not bounded_textgen");
  const std::size_t space = sequence_space_size(cfg.params.V, cfg.params.l, cfg.explosion_limit);
  if (space < 2) throw ParameterError("V^l must be at least 2");
  BoundReport r;
  r.config = cfg;
  r.bound = calculate("bounded_textgen", cfg.params, BoundMode::big_o);
  r.samples = cfg.samples_override.value_or(r.bound.per_context);
  if (cfg.samples_override) r.notes.push_back("per-context example count overridden by config");
  finalize(r, run_trials(cfg, [&](std::uint64_t i) { return bounded_textgen_trial(cfg, space, r.samples, i); }));
  return r;
}

BoundReport run_coreset_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::coreset) throw ParameterError("config kind is not coreset");
  BoundReport r;
  r.config = cfg;
  r.bound = calculate("coreset", cfg.params, BoundMode::big_o);
  const std::uint64_t n = cfg.dataset_size;
  r.samples = clamp_to(cfg.samples_override.value_or(r.bound.per_context), n, "coreset size", r);
  std::vector<std::uint64_t> sizes;
  for (auto s : cfg.sweep) sizes.push_back(clamp_to(s, n, "sweep coreset size", r));

  std::atomic<bool> single_class{false};
  auto trials = run_trials(cfg, [&](std::uint64_t i) {
    Rng rng = trial_rng(cfg, i);
    TrialResult t;
    const PlantedTask task = planted_linear_task(n, cfg.params.d, cfg.cluster_mean, cfg.noise_scale, rng);
    if (task.data.single_class()) single_class = true;
    auto eval = planted_inputs(cfg.eval_points, task.direction, cfg.cluster_mean, cfg.noise_scale, rng);
    for (const auto& p : task.data.points()) eval.push_back(p.x);
    try {
      const LinearModel full = train_logistic(task.data, cfg.train);
      auto error_at = [&](std::uint64_t size) {
        const LabeledDataset core = select_coreset(task.data, size, cfg.coreset_strategy, rng, full);
        const IclClassifier oracle(core, cfg.train, cfg.eta);
        double worst = 0.0;
        for (const auto& x : eval) worst = std::max(worst, std::abs(oracle.prob(x) - predict_prob(full, x)));
        return worst;
      };
      t.sup_error = error_at(r.samples);
      for (auto s : sizes) t.sweep_errors.push_back(error_at(s));
    } catch (const DivergenceError& e) {
      t.sup_error = 1.0;
      t.failed = true;
      t.reason = e.what();
    }
    return t;
  });
  finalize(r, std::move(trials));
  if (single_class) r.notes.push_back("some trial drew a single-class dataset; the coreset guarantee is vacuous there");
  r.notes.push_back("sup error is a max over " + std::to_string(cfg.eval_points) +
                    " fresh inputs plus the dataset: a lower bound on the supremum over R^d");
  summarize_sweep(r, "coreset_size", sizes);
  return r;
}

BoundReport run_knn_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::knn) throw ParameterError("config kind is not knn");
  BoundReport r;
  r.config = cfg;
  r.bound = calculate("knn", cfg.params, BoundMode::big_o);
  const std::uint64_t n = cfg.dataset_size;
  r.samples = clamp_to(cfg.samples_override.value_or(r.bound.per_context), n, "k", r);
  std::vector<std::uint64_t> ks;
  for (auto k : cfg.sweep) ks.push_back(clamp_to(k, n, "sweep k", r));

  auto trials = run_trials(cfg, [&](std::uint64_t i) {
    Rng rng = trial_rng(cfg, i);
    TrialResult t;
    const PlantedTask task = planted_linear_task(n, cfg.params.d, cfg.cluster_mean, cfg.noise_scale, rng);
    const auto queries = planted_inputs(cfg.eval_points, task.direction, cfg.cluster_mean, cfg.noise_scale, rng);
    try {
      auto error_at = [&](std::uint64_t k) {
        double worst = 0.0;
        for (const auto& q : queries) {
          const IclClassifier oracle(knn_select(task.data, q, k), cfg.local_train, cfg.eta);
          worst = std::max(worst, std::abs(oracle.prob(q) - predict_prob(task.planted, q)));
        }
        return worst;
      };
      t.sup_error = error_at(r.samples);
      for (auto k : ks) t.sweep_errors.push_back(error_at(k));
    } catch (const DivergenceError& e) {
      t.sup_error = 1.0;
      t.failed = true;
      t.reason = e.what();
    }
    return t;
  });
  finalize(r, std::move(trials));
  r.notes.push_back("error is measured against the planted model at each query, max over " +
                    std::to_string(cfg.eval_points) + " queries");
  summarize_sweep(r, "k", ks);
  return r;
}

BoundReport run_subset_penalty_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.kind != ExperimentKind::subset_penalty) throw ParameterError("config kind is not subset_penalty");
  BoundReport r;
  r.config = cfg;
  const std::vector<std::uint64_t> grid = cfg.sweep.empty() ? kDefaultSubsetGrid : cfg.sweep;
  const std::uint64_t largest = *std::max_element(grid.begin(), grid.end());
  r.samples = largest;
  r.bound.per_context = largest;
  r.bound.total = largest;
  r.bound.raw_value = subset_penalty(largest, cfg.params.constant);
  r.bound.formula_text = "penalty(n) = c / sqrt(n); c = " + std::to_string(cfg.params.constant);

  auto trials = run_trials(cfg, [&](std::uint64_t i) {
    Rng rng = trial_rng(cfg, i);
    const SyntheticTask task = random_task(cfg.params.V, 1, cfg.concentration, rng);
    const Context& ctx = task.contexts[0];
    const auto all = sample_tokens(task.dists[0], largest, rng);
    TrialResult t;
    for (auto n : grid) {
      // Nested subsets: the first n draws of one stream.
      IclPromptSamples prompt;
      prompt.per_context[ctx.id].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
      const double err = l1_distance(icl_textgen_dist(prompt, ctx, task.vocab, cfg.eta), task.dists[0]);
      t.sweep_errors.push_back(err);
      t.sup_error = std::max(t.sup_error, std::max(0.0, err - subset_penalty(n, cfg.params.constant)));
    }
    return t;
  });
  finalize(r, std::move(trials));
  r.notes.push_back("trial error is max over subset sizes n of max(0, L1(n) - c/sqrt(n))");
  summarize_sweep(r, "subset_size", grid);
  return r;
}

BoundReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::textgen: return run_textgen_experiment(cfg);
    case ExperimentKind::bounded_textgen: return run_bounded_textgen_experiment(cfg);
    case ExperimentKind::coreset: return run_coreset_experiment(cfg);
    case ExperimentKind::knn: return run_knn_experiment(cfg);
    case ExperimentKind::subset_penalty: return run_subset_penalty_experiment(cfg);
  }
  throw ParameterError("unknown experiment kind");
}

// ---------------------------------------------------------------------------
// JSON / CSV

namespace {

json train_to_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"max_iters", t.max_iters},
          {"grad_tolerance", t.grad_tolerance},
          {"l2_reg", t.l2_reg}};
}

TrainConfig train_from_json(const json& j, TrainConfig t) {
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.max_iters = j.value("max_iters", t.max_iters);
  t.grad_tolerance = j.value("grad_tolerance", t.grad_tolerance);
  t.l2_reg = j.value("l2_reg", t.l2_reg);
  return t;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    if (!j.is_object()) throw ParameterError("experiment config must be a JSON object");
    if (j.contains("kind")) cfg.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    if (j.contains("params")) {
      const json& p = j.at("params");
      cfg.params.V = p.value("V", cfg.params.V);
      cfg.params.m = p.value("m", cfg.params.m);
      cfg.params.d = p.value("d", cfg.params.d);
      cfg.params.l = p.value("l", cfg.params.l);
      cfg.params.epsilon = p.value("epsilon", cfg.params.epsilon);
      cfg.params.delta = p.value("delta", cfg.params.delta);
      cfg.params.constant = p.value("constant", cfg.params.constant);
    }
    if (j.contains("mode")) cfg.mode = parse_bound_mode(j.at("mode").get<std::string>());
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("eta")) {
      const json& e = j.at("eta");
      cfg.eta.kind = parse_eta_kind(e.value("kind", std::string("none")));
      cfg.eta.eta = e.value("eta", 0.0);
    }
    cfg.eval_points = j.value("eval_points", cfg.eval_points);
    cfg.output_path = j.value("output_path", cfg.output_path);
    cfg.concentration = j.value("concentration", cfg.concentration);
    cfg.dataset_size = j.value("dataset_size", cfg.dataset_size);
    cfg.cluster_mean = j.value("cluster_mean", cfg.cluster_mean);
    cfg.noise_scale = j.value("noise_scale", cfg.noise_scale);
    cfg.explosion_limit = j.value("explosion_limit", cfg.explosion_limit);
    if (j.contains("samples_override") && !j.at("samples_override").is_null()) {
      cfg.samples_override = j.at("samples_override").get<std::uint64_t>();
    }
    if (j.contains("sweep")) cfg.sweep = j.at("sweep").get<std::vector<std::uint64_t>>();
    if (j.contains("coreset_strategy")) {
      const auto s = j.at("coreset_strategy").get<std::string>();
      if (s == "uniform") cfg.coreset_strategy = CoresetStrategy::uniform;
      else if (s == "sensitivity") cfg.coreset_strategy = CoresetStrategy::sensitivity;
      else throw ParameterError("unknown coreset_strategy '" + s + "'");
    }
    if (j.contains("train")) cfg.train = train_from_json(j.at("train"), cfg.train);
    if (j.contains("local_train")) cfg.local_train = train_from_json(j.at("local_train"), cfg.local_train);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("invalid experiment config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& cfg) {
  json j = {
      {"kind", to_string(cfg.kind)},
      {"params",
       {{"V", cfg.params.V},
        {"m", cfg.params.m},
        {"d", cfg.params.d},
        {"l", cfg.params.l},
        {"epsilon", cfg.params.epsilon},
        {"delta", cfg.params.delta},
        {"constant", cfg.params.constant}}},
      {"mode", to_string(cfg.mode)},
      {"trials", cfg.trials},
      {"seed", cfg.seed},
      {"eta", {{"kind", to_string(cfg.eta.kind)}, {"eta", cfg.eta.eta}}},
      {"eval_points", cfg.eval_points},
      {"concentration", cfg.concentration},
      {"dataset_size", cfg.dataset_size},
      {"cluster_mean", cfg.cluster_mean},
      {"noise_scale", cfg.noise_scale},
      {"explosion_limit", cfg.explosion_limit},
      {"samples_override", cfg.samples_override ? json(*cfg.samples_override) : json(nullptr)},
      {"sweep", cfg.sweep},
      {"coreset_strategy", cfg.coreset_strategy == CoresetStrategy::uniform ? "uniform" : "sensitivity"},
      {"train", train_to_json(cfg.train)},
      {"local_train", train_to_json(cfg.local_train)},
  };
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

json report_to_json(const BoundReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials) {
    json row = {{"trial_index", t.trial_index}, {"sup_error", t.sup_error}, {"failed", t.failed}};
    if (!t.reason.empty()) row["reason"] = t.reason;
    if (!t.sweep_errors.empty()) row["sweep_errors"] = t.sweep_errors;
    trials.push_back(std::move(row));
  }
  json j = {
      {"config", config_to_json(r.config)},
      {"bound",
       {{"per_context", r.bound.per_context},
        {"total", r.bound.total},
        {"mode", to_string(r.bound.mode)},
        {"formula_text", r.bound.formula_text},
        {"raw_value", r.bound.raw_value}}},
      {"samples_used", r.samples},
      {"threshold", r.threshold},
      {"failure_rate", r.failure_rate},
      {"delta_target", r.delta_target},
      {"ci_halfwidth", r.ci_halfwidth},
      {"pass", r.pass},
      {"notes", r.notes},
      {"trials", std::move(trials)},
  };
  if (r.sweep) {
    j["sweep"] = {{"parameter", r.sweep->parameter},
                  {"values", r.sweep->values},
                  {"median_error", r.sweep->median_error},
                  {"loglog_slope", r.sweep->loglog_slope ? json(*r.sweep->loglog_slope) : json(nullptr)}};
  }
  return j;
}

std::string report_to_csv(const BoundReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "trial_index,sup_error,failed\n";
  for (const auto& t : r.trials) os << t.trial_index << ',' << t.sup_error << ',' << (t.failed ? 1 : 0) << '\n';
  return os.str();
}

std::string csv_path_for(const std::string& json_path) {
  const auto slash = json_path.find_last_of('/');
  const auto dot = json_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return json_path + ".csv";
  return json_path.substr(0, dot) + ".csv";
}

void write_report(const BoundReport& report, const std::string& path) {
  auto write = [](const std::string& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + p + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + p + "' failed");
  };
  write(path, report_to_json(report).dump(2) + "\n");
  write(csv_path_for(path), report_to_csv(report));
}

}  // namespace icl_lab
