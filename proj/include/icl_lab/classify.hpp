#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "icl_lab/random.hpp"

namespace icl_lab {

struct LabeledPoint {
  std::vector<double> x;
  int y = 0;  // 0 or 1
};

/// Points in R^d with binary labels. All points share `dim`; at least one point.
class LabeledDataset {
 public:
  LabeledDataset(std::size_t dim, std::vector<LabeledPoint> points);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<LabeledPoint>& points() const noexcept { return points_; }

  /// True if every label is the same; coreset and k-NN guarantees are vacuous then.
  bool single_class() const;

  /// Subset in the order given by `indices`.
  LabeledDataset select(std::span<const std::size_t> indices) const;

 private:
  std::size_t dim_;
  std::vector<LabeledPoint> points_;
};

struct LinearModel {
  std::vector<double> w;
  double b = 0.0;

  static LinearModel zeros(std::size_t dim) { return LinearModel{std::vector<double>(dim, 0.0), 0.0}; }
  double logit(std::span<const double> x) const;
};

struct TrainConfig {
  double learning_rate = 1.0;
  std::size_t max_iters = 2000;
  double grad_tolerance = 1e-7;
  double l2_reg = 1e-4;

  void validate() const;
};

/// Trajectory of a training run: loss before iteration 0 and after each accepted step.
struct TrainTrace {
  LinearModel model;
  std::vector<double> losses;
  std::size_t iterations = 0;
  std::size_t step_halvings = 0;
  bool converged = false;
};

double sigmoid(double z);

/// Mean logistic loss (1/N) sum log(1 + exp(-s_i (w.x_i + b))) with s_i = 2 y_i - 1,
/// plus (l2_reg / 2) |w|^2. The bias is not regularized.
double logistic_loss(const LinearModel& model, const LabeledDataset& data, double l2_reg);

/// Analytic gradient of logistic_loss; returns (dL/dw, dL/db).
std::pair<std::vector<double>, double> logistic_loss_gradient(const LinearModel& model,
                                                              const LabeledDataset& data,
                                                              double l2_reg);

/// Full-batch gradient descent from w = 0, b = 0.
///
/// Stops after max_iters steps or once the gradient norm drops below
/// grad_tolerance. A step that would raise the loss is retried with half the
/// learning rate (the halved rate is kept); after 30 consecutive halvings the
/// run stops. Features are centered internally, which leaves the objective
/// unchanged because the bias is unregularized. Throws DivergenceError if the
/// loss becomes non-finite.
LinearModel train_logistic(const LabeledDataset& data, const TrainConfig& cfg);
TrainTrace train_logistic_traced(const LabeledDataset& data, const TrainConfig& cfg);

/// sigmoid(w.x + b), stable for large |w.x + b|.
double predict_prob(const LinearModel& model, std::span<const double> x);

enum class CoresetStrategy { uniform, sensitivity };

/// Subset of `size` distinct points, returned in dataset order.
///
/// uniform: every subset equally likely. sensitivity: weighted sampling without
/// replacement with weight 1 + |x| * 4 sigma(z)(1 - sigma(z)), where z is the
/// logit of `reference` (or of a short pilot fit on the whole dataset when no
/// reference is given). size == N returns the dataset unchanged.
LabeledDataset select_coreset(const LabeledDataset& data, std::size_t size, CoresetStrategy strategy,
                              Rng& rng, const std::optional<LinearModel>& reference = std::nullopt);

/// The k points closest to `query` in Euclidean distance, nearest first; equal
/// distances go to the lower dataset index.
LabeledDataset knn_select(const LabeledDataset& data, std::span<const double> query, std::size_t k);
std::vector<std::size_t> knn_indices(const LabeledDataset& data, std::span<const double> query,
                                     std::size_t k);

/// max over eval_points of |sigmoid(a.x + b_a) - sigmoid(b.x + b_b)|. A lower
/// bound on the supremum over all of R^d.
double sup_prob_error(const LinearModel& a, const LinearModel& b,
                      std::span<const std::vector<double>> eval_points);

}  // namespace icl_lab
