#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "icl_lab/random.hpp"

namespace icl_lab {

using TokenIndex = std::size_t;

/// Tolerance on the probability sum of a categorical distribution.
inline constexpr double kProbSumTolerance = 1e-9;

/// Ordered set of distinct tokens; index <-> token is a bijection.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Tokens named "0", "1", ..., "size-1".
  static Vocabulary with_size(std::size_t size);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(TokenIndex index) const;
  TokenIndex index_of(const std::string& token) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenIndex> index_;
};

/// Probability vector over a finite vocabulary.
///
/// Construction validates entries (finite, in [0,1]) and the sum (1 within
/// kProbSumTolerance), then renormalizes so the stored sum is 1 up to rounding.
class CategoricalDistribution {
 public:
  explicit CategoricalDistribution(std::vector<double> probs);

  static CategoricalDistribution uniform(std::size_t size);
  static CategoricalDistribution point_mass(std::size_t size, TokenIndex at);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](TokenIndex v) const { return probs_[v]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Inverse-CDF draw.
  TokenIndex sample(Rng& rng) const;

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

struct Context {
  std::size_t id = 0;
  std::optional<std::vector<std::string>> label;
};

/// Ground-truth next-token distributions, one per context.
struct SyntheticTask {
  Vocabulary vocab;
  std::vector<Context> contexts;
  std::vector<CategoricalDistribution> dists;

  std::size_t num_contexts() const noexcept { return contexts.size(); }
};

/// Sum over tokens of |p(v) - q(v)|. This L1 sum is the metric every bound uses.
double l1_distance(const CategoricalDistribution& p, const CategoricalDistribution& q);

/// Standard total variation, l1_distance / 2. Not used by any bound check.
double tv_distance(const CategoricalDistribution& p, const CategoricalDistribution& q);

CategoricalDistribution empirical_distribution(std::span<const TokenIndex> samples,
                                               std::size_t vocab_size);
CategoricalDistribution empirical_distribution(std::span<const TokenIndex> samples,
                                               const Vocabulary& vocab);

std::vector<TokenIndex> sample_tokens(const CategoricalDistribution& dist, std::size_t n, Rng& rng);

/// Symmetric Dirichlet(concentration) draw over `size` outcomes (normalized Gammas).
CategoricalDistribution random_dirichlet(std::size_t size, double concentration, Rng& rng);

/// V-token task with m contexts whose distributions are independent Dirichlet draws.
/// Large concentrations approach uniform; small ones give skewed, rare-token heavy rows.
SyntheticTask random_task(std::size_t vocab_size, std::size_t num_contexts, double concentration,
                          Rng& rng);

}  // namespace icl_lab
