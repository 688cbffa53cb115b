#include "icl_lab/dist_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icl_lab/errors.hpp"

namespace icl_lab {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw ParameterError("vocabulary must contain at least one token");
  index_.reserve(tokens_.size());
  for (TokenIndex i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw ParameterError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::with_size(std::size_t size) {
  std::vector<std::string> tokens(size);
  for (std::size_t i = 0; i < size; ++i) tokens[i] = std::to_string(i);
  return Vocabulary(std::move(tokens));
}

const std::string& Vocabulary::token(TokenIndex index) const {
  if (index >= tokens_.size()) {
    throw IndexError("token index " + std::to_string(index) + " out of range for vocabulary of size " +
                     std::to_string(tokens_.size()));
  }
  return tokens_[index];
}

TokenIndex Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw IndexError("unknown token '" + token + "'");
  return it->second;
}

CategoricalDistribution::CategoricalDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw EmptyInputError("distribution over an empty vocabulary");
  double sum = 0.0;
  for (std::size_t v = 0; v < probs_.size(); ++v) {
    const double p = probs_[v];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kProbSumTolerance) {
      throw ParameterError("probability at index " + std::to_string(v) + " is outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTolerance) {
    throw ParameterError("probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  for (double& p : probs_) p /= sum;

  cdf_.resize(probs_.size());
  std::partial_sum(probs_.begin(), probs_.end(), cdf_.begin());
  // Pin the tail so a draw of u close to 1 never falls off the end.
  cdf_.back() = 1.0;
}

CategoricalDistribution CategoricalDistribution::uniform(std::size_t size) {
  if (size == 0) throw EmptyInputError("distribution over an empty vocabulary");
  return CategoricalDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

CategoricalDistribution CategoricalDistribution::point_mass(std::size_t size, TokenIndex at) {
  if (at >= size) throw IndexError("point mass index out of range");
  std::vector<double> probs(size, 0.0);
  probs[at] = 1.0;
  return CategoricalDistribution(std::move(probs));
}

TokenIndex CategoricalDistribution::sample(Rng& rng) const {
  const double u = rng.uniform();
  // First index whose cumulative mass exceeds u; zero-mass entries are never chosen.
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<TokenIndex>(it - cdf_.begin());
}

double l1_distance(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  if (p.size() != q.size()) {
    throw DimensionError("l1_distance: vocabulary sizes differ (" + std::to_string(p.size()) + " vs " +
                         std::to_string(q.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) total += std::abs(p[v] - q[v]);
  return total;
}

double tv_distance(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  return 0.5 * l1_distance(p, q);
}

CategoricalDistribution empirical_distribution(std::span<const TokenIndex> samples,
                                               std::size_t vocab_size) {
  if (samples.empty()) throw EmptyInputError("empirical_distribution: no samples");
  std::vector<std::size_t> counts(vocab_size, 0);
  for (TokenIndex s : samples) {
    if (s >= vocab_size) {
      throw IndexError("empirical_distribution: sample " + std::to_string(s) +
                       " out of range for vocabulary of size " + std::to_string(vocab_size));
    }
    ++counts[s];
  }
  const double n = static_cast<double>(samples.size());
  std::vector<double> probs(vocab_size);
  for (std::size_t v = 0; v < vocab_size; ++v) probs[v] = static_cast<double>(counts[v]) / n;
  return CategoricalDistribution(std::move(probs));
}

CategoricalDistribution empirical_distribution(std::span<const TokenIndex> samples,
                                               const Vocabulary& vocab) {
  return empirical_distribution(samples, vocab.size());
}

std::vector<TokenIndex> sample_tokens(const CategoricalDistribution& dist, std::size_t n, Rng& rng) {
  if (n == 0) throw ParameterError("sample_tokens: n must be at least 1");
  std::vector<TokenIndex> out(n);
  for (auto& s : out) s = dist.sample(rng);
  return out;
}

CategoricalDistribution random_dirichlet(std::size_t size, double concentration, Rng& rng) {
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw ParameterError("concentration must be a positive finite real");
  }
  if (size == 0) throw ParameterError("distribution size must be at least 1");
  std::vector<double> g(size);
  double sum = 0.0;
  // Tiny concentrations can underflow every Gamma draw to zero; redraw in that case.
  do {
    sum = 0.0;
    for (auto& x : g) {
      x = rng.gamma(concentration);
      sum += x;
    }
  } while (!(sum > 0.0));
  for (auto& x : g) x /= sum;
  return CategoricalDistribution(std::move(g));
}

SyntheticTask random_task(std::size_t vocab_size, std::size_t num_contexts, double concentration,
                          Rng& rng) {
  if (vocab_size < 2) throw ParameterError("random_task: V must be at least 2");
  if (num_contexts < 1) throw ParameterError("random_task: m must be at least 1");
  if (!(concentration > 0.0) || !std::isfinite(concentration)) {
    throw ParameterError("random_task: concentration must be a positive finite real");
  }
  SyntheticTask task{Vocabulary::with_size(vocab_size), {}, {}};
  task.contexts.reserve(num_contexts);
  task.dists.reserve(num_contexts);
  for (std::size_t i = 0; i < num_contexts; ++i) {
    task.contexts.push_back(Context{i, std::nullopt});
    task.dists.push_back(random_dirichlet(vocab_size, concentration, rng));
  }
  return task;
}

}  // namespace icl_lab
