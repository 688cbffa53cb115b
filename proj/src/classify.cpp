#include "icl_lab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "icl_lab/errors.hpp"

namespace icl_lab {

namespace {

constexpr std::size_t kMaxStepHalvings = 30;

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) {
  return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_dims(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

// Row-major centered design matrix with +-1 labels.
struct CenteredData {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> mean;
  std::vector<double> x;
  std::vector<double> sign;

  explicit CenteredData(const LabeledDataset& data)
      : n(data.size()), dim(data.dim()), mean(data.dim(), 0.0), x(n * dim), sign(n) {
    for (const auto& p : data.points()) {
      for (std::size_t j = 0; j < dim; ++j) mean[j] += p.x[j];
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = data[i];
      for (std::size_t j = 0; j < dim; ++j) x[i * dim + j] = p.x[j] - mean[j];
      sign[i] = p.y == 1 ? 1.0 : -1.0;
    }
  }

  std::span<const double> row(std::size_t i) const { return {x.data() + i * dim, dim}; }

  double loss(std::span<const double> w, double b, double l2) const {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += softplus_neg(sign[i] * (dot(w, row(i)) + b));
    return total / static_cast<double>(n) + 0.5 * l2 * dot(w, w);
  }

  // Gradient into (gw, gb); returns its Euclidean norm.
  double gradient(std::span<const double> w, double b, double l2, std::vector<double>& gw,
                  double& gb) const {
    std::fill(gw.begin(), gw.end(), 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double coeff = -sign[i] * sigmoid(-sign[i] * (dot(w, row(i)) + b));
      const auto xi = row(i);
      for (std::size_t j = 0; j < dim; ++j) gw[j] += coeff * xi[j];
      gb += coeff;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < dim; ++j) gw[j] = gw[j] * inv_n + l2 * w[j];
    gb *= inv_n;
    return std::sqrt(dot(gw, gw) + gb * gb);
  }
};

}  // namespace

LabeledDataset::LabeledDataset(std::size_t dim, std::vector<LabeledPoint> points)
    : dim_(dim), points_(std::move(points)) {
  if (dim_ < 1) throw ParameterError("dataset dimension must be at least 1");
  if (points_.empty()) throw EmptyInputError("dataset must contain at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.x.size() != dim_) {
      throw DimensionError("point " + std::to_string(i) + " has dimension " + std::to_string(p.x.size()) +
                           ", dataset dimension is " + std::to_string(dim_));
    }
    if (p.y != 0 && p.y != 1) throw ParameterError("point " + std::to_string(i) + " has a non-binary label");
    for (double v : p.x) {
      if (!std::isfinite(v)) throw ParameterError("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

bool LabeledDataset::single_class() const {
  return std::all_of(points_.begin(), points_.end(), [&](const auto& p) { return p.y == points_[0].y; });
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> indices) const {
  std::vector<LabeledPoint> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= points_.size()) throw IndexError("dataset index " + std::to_string(i) + " out of range");
    out.push_back(points_[i]);
  }
  return LabeledDataset(dim_, std::move(out));
}

double LinearModel::logit(std::span<const double> x) const {
  check_dims(w.size(), x.size(), "LinearModel::logit");
  return dot(w, x) + b;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning_rate must be positive");
  }
  if (!(grad_tolerance > 0.0)) throw ParameterError("grad_tolerance must be positive");
  if (!(l2_reg >= 0.0) || !std::isfinite(l2_reg)) throw ParameterError("l2_reg must be non-negative");
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_loss(const LinearModel& model, const LabeledDataset& data, double l2_reg) {
  check_dims(data.dim(), model.w.size(), "logistic_loss");
  double total = 0.0;
  for (const auto& p : data.points()) {
    const double s = p.y == 1 ? 1.0 : -1.0;
    total += softplus_neg(s * model.logit(p.x));
  }
  return total / static_cast<double>(data.size()) + 0.5 * l2_reg * dot(model.w, model.w);
}

std::pair<std::vector<double>, double> logistic_loss_gradient(const LinearModel& model,
                                                              const LabeledDataset& data,
                                                              double l2_reg) {
  check_dims(data.dim(), model.w.size(), "logistic_loss_gradient");
  std::vector<double> gw(data.dim(), 0.0);
  double gb = 0.0;
  for (const auto& p : data.points()) {
    const double s = p.y == 1 ? 1.0 : -1.0;
    const double coeff = -s * sigmoid(-s * model.logit(p.x));
    for (std::size_t j = 0; j < gw.size(); ++j) gw[j] += coeff * p.x[j];
    gb += coeff;
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t j = 0; j < gw.size(); ++j) gw[j] = gw[j] * inv_n + l2_reg * model.w[j];
  return {std::move(gw), gb * inv_n};
}

TrainTrace train_logistic_traced(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const CenteredData cd(data);
  const std::size_t dim = data.dim();

  std::vector<double> w(dim, 0.0), gw(dim), trial_w(dim);
  double b = 0.0, gb = 0.0;
  double lr = cfg.learning_rate;
  double loss = cd.loss(w, b, cfg.l2_reg);

  TrainTrace trace;
  trace.losses.push_back(loss);
  for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
    const double gnorm = cd.gradient(w, b, cfg.l2_reg, gw, gb);
    if (!std::isfinite(gnorm)) {
      throw DivergenceError("non-finite gradient at iteration " + std::to_string(iter), iter);
    }
    if (gnorm < cfg.grad_tolerance) {
      trace.converged = true;
      break;
    }
    bool accepted = false;
    for (std::size_t halvings = 0;; ++halvings) {
      for (std::size_t j = 0; j < dim; ++j) trial_w[j] = w[j] - lr * gw[j];
      const double trial_b = b - lr * gb;
      const double trial_loss = cd.loss(trial_w, trial_b, cfg.l2_reg);
      if (!std::isfinite(trial_loss)) {
        throw DivergenceError("non-finite loss at iteration " + std::to_string(iter), iter);
      }
      if (trial_loss <= loss) {
        w.swap(trial_w);
        b = trial_b;
        loss = trial_loss;
        accepted = true;
        break;
      }
      if (halvings == kMaxStepHalvings) break;
      lr *= 0.5;
      ++trace.step_halvings;
    }
    if (!accepted) {
      // No descent step is representable any more: numerically at the optimum.
      trace.converged = true;
      break;
    }
    trace.losses.push_back(loss);
    trace.iterations = iter + 1;
  }

  trace.model.w = w;
  trace.model.b = b - dot(w, cd.mean);
  return trace;
}

LinearModel train_logistic(const LabeledDataset& data, const TrainConfig& cfg) {
  return train_logistic_traced(data, cfg).model;
}

double predict_prob(const LinearModel& model, std::span<const double> x) {
  return sigmoid(model.logit(x));
}

LabeledDataset select_coreset(const LabeledDataset& data, std::size_t size, CoresetStrategy strategy,
                              Rng& rng, const std::optional<LinearModel>& reference) {
  const std::size_t n = data.size();
  if (size < 1 || size > n) {
    throw ParameterError("coreset size " + std::to_string(size) + " must lie in [1, " +
                         std::to_string(n) + "]");
  }
  if (size == n) return data;

  std::vector<std::size_t> chosen;
  if (strategy == CoresetStrategy::uniform) {
    // Partial Fisher-Yates.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(idx[i], idx[j]);
    }
    chosen.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(size));
  } else {
    LinearModel scorer;
    if (reference) {
      check_dims(data.dim(), reference->w.size(), "select_coreset reference");
      scorer = *reference;
    } else {
      scorer = train_logistic(data, TrainConfig{1.0, 200, 1e-6, 1e-4});
    }
    // Efraimidis-Spirakis: keep the `size` largest keys log(u) / weight.
    std::vector<std::pair<double, std::size_t>> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& x = data[i].x;
      const double s = sigmoid(scorer.logit(x));
      const double weight = 1.0 + std::sqrt(dot(x, x)) * 4.0 * s * (1.0 - s);
      keys[i] = {std::log(rng.uniform_open()) / weight, i};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(size), keys.end(),
                      [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                      });
    for (std::size_t i = 0; i < size; ++i) chosen.push_back(keys[i].second);
  }
  std::sort(chosen.begin(), chosen.end());
  return data.select(chosen);
}

std::vector<std::size_t> knn_indices(const LabeledDataset& data, std::span<const double> query,
                                     std::size_t k) {
  check_dims(data.dim(), query.size(), "knn_select query");
  const std::size_t n = data.size();
  if (k < 1 || k > n) {
    throw ParameterError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = data[i].x;
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - query[j];
      s += diff * diff;
    }
    dist[i] = {s, i};
  }
  // pair ordering is (distance, index): ties go to the lower index.
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

LabeledDataset knn_select(const LabeledDataset& data, std::span<const double> query, std::size_t k) {
  const auto idx = knn_indices(data, query, k);
  return data.select(idx);
}

double sup_prob_error(const LinearModel& a, const LinearModel& b,
                      std::span<const std::vector<double>> eval_points) {
  if (eval_points.empty()) throw EmptyInputError("sup_prob_error: empty evaluation set");
  check_dims(a.w.size(), b.w.size(), "sup_prob_error models");
  double worst = 0.0;
  for (const auto& x : eval_points) {
    worst = std::max(worst, std::abs(predict_prob(a, x) - predict_prob(b, x)));
  }
  return worst;
}

}  // namespace icl_lab
