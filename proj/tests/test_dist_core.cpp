#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "icl_lab/dist_core.hpp"
#include "icl_lab/errors.hpp"
#include "icl_lab/verify_harness.hpp"

using namespace icl_lab;

namespace {

CategoricalDistribution dist(std::vector<double> p) { return CategoricalDistribution(std::move(p)); }

}  // namespace

TEST(Vocabulary, BijectionAndErrors) {
  Vocabulary v({"the", "cat", "sat"});
  EXPECT_EQ(v.size(), 3u);
  for (TokenIndex i = 0; i < v.size(); ++i) EXPECT_EQ(v.index_of(v.token(i)), i);
  EXPECT_THROW(Vocabulary({"a", "a"}), ParameterError);
  EXPECT_THROW(Vocabulary(std::vector<std::string>{}), ParameterError);
  EXPECT_THROW(v.token(3), IndexError);
  EXPECT_THROW(v.index_of("dog"), IndexError);
}

TEST(CategoricalDistribution, ValidatesAndRenormalizes) {
  EXPECT_THROW(dist({0.5, 0.6}), ParameterError);
  EXPECT_THROW(dist({-0.1, 1.1}), ParameterError);
  EXPECT_THROW(dist({}), EmptyInputError);
  EXPECT_THROW(dist({std::nan(""), 1.0}), ParameterError);
  // Within tolerance: accepted and renormalized.
  auto d = dist({0.5 + 4e-10, 0.5});
  EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
}

TEST(L1Distance, Examples) {
  EXPECT_DOUBLE_EQ(l1_distance(dist({1, 0}), dist({0, 1})), 2.0);
  EXPECT_DOUBLE_EQ(l1_distance(dist({0.2, 0.3, 0.5}), dist({0.2, 0.3, 0.5})), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(dist({0.5, 0.5}), dist({0.75, 0.25})), 0.5);
  EXPECT_DOUBLE_EQ(tv_distance(dist({0.5, 0.5}), dist({0.75, 0.25})), 0.25);
  EXPECT_THROW(l1_distance(dist({1.0}), dist({0.5, 0.5})), DimensionError);
}

TEST(L1Distance, MetricPropertiesOnRandomTriples) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::size_t V = 2 + rng.below(12);
    const double conc = 0.2 + 3.0 * rng.uniform();
    auto p = random_dirichlet(V, conc, rng);
    auto q = random_dirichlet(V, conc, rng);
    auto r = random_dirichlet(V, conc, rng);
    const double pq = l1_distance(p, q);
    EXPECT_DOUBLE_EQ(pq, l1_distance(q, p));
    EXPECT_LE(pq, l1_distance(p, r) + l1_distance(r, q) + 1e-12);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 2.0 + 1e-12);
    EXPECT_EQ(l1_distance(p, p), 0.0);
  }
}

TEST(EmpiricalDistribution, Examples) {
  std::vector<TokenIndex> s1{0, 0, 1, 1};
  auto e1 = empirical_distribution(s1, 3);
  EXPECT_EQ(std::vector<double>(e1.probs().begin(), e1.probs().end()), (std::vector<double>{0.5, 0.5, 0.0}));

  std::vector<TokenIndex> s2(10, 2);
  auto e2 = empirical_distribution(s2, Vocabulary::with_size(3));
  EXPECT_EQ(std::vector<double>(e2.probs().begin(), e2.probs().end()), (std::vector<double>{0.0, 0.0, 1.0}));

  EXPECT_THROW(empirical_distribution(std::vector<TokenIndex>{}, 3), EmptyInputError);
  EXPECT_THROW(empirical_distribution(std::vector<TokenIndex>{0, 3}, 3), IndexError);
}

TEST(SampleTokens, PointMassAndDeterminism) {
  Rng rng(1);
  EXPECT_EQ(sample_tokens(CategoricalDistribution::point_mass(5, 3), 5, rng),
            (std::vector<TokenIndex>{3, 3, 3, 3, 3}));

  Rng a(12345), b(12345);
  const auto half = dist({0.5, 0.5});
  EXPECT_EQ(sample_tokens(half, 4, a), sample_tokens(half, 4, b));
  EXPECT_THROW(sample_tokens(half, 0, a), ParameterError);
}

TEST(SampleTokens, NeverDrawsZeroMassTokens) {
  Rng rng(3);
  auto d = dist({0.0, 0.3, 0.0, 0.7, 0.0});
  for (auto t : sample_tokens(d, 20000, rng)) EXPECT_TRUE(t == 1 || t == 3);
}

// Binomial check: with n = 10^4 draws from [0.9, 0.1] the L1 error is
// 2 |p_hat - 0.1|, whose standard deviation is 2 sqrt(0.09 / 10^4) = 0.006.
// The 0.05 threshold sits at more than 8 standard deviations.
TEST(SampleTokens, LawOfLargeNumbers) {
  const auto p = dist({0.9, 0.1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto s = sample_tokens(p, 10'000, rng);
    EXPECT_LT(l1_distance(empirical_distribution(s, 2), p), 0.05);
  }
}

TEST(SampleTokens, EmpiricalConvergesMedianDecreases) {
  Rng task_rng(99);
  const auto p = random_dirichlet(8, 1.0, task_rng);
  double previous = 3.0;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    std::vector<double> errors;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng = Rng::derive(seed, n);
      errors.push_back(l1_distance(empirical_distribution(sample_tokens(p, n, rng), 8), p));
    }
    const double med = median(errors);
    EXPECT_LT(med, previous) << "n = " << n;
    previous = med;
  }
}

TEST(RandomTask, ValidAndDeterministic) {
  Rng rng(5);
  const auto task = random_task(4, 2, 1.0, rng);
  ASSERT_EQ(task.num_contexts(), 2u);
  ASSERT_EQ(task.dists.size(), 2u);
  for (const auto& d : task.dists) {
    double sum = 0.0;
    for (double p : d.probs()) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  for (std::size_t i = 0; i < task.contexts.size(); ++i) EXPECT_EQ(task.contexts[i].id, i);

  Rng a(77), b(77);
  const auto ta = random_task(10, 3, 0.5, a);
  const auto tb = random_task(10, 3, 0.5, b);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(l1_distance(ta.dists[i], tb.dists[i]), 0.0);
}

TEST(RandomTask, LargeConcentrationApproachesUniform) {
  Rng rng(11);
  const auto task = random_task(10, 5, 1e6, rng);
  for (const auto& d : task.dists) EXPECT_LT(l1_distance(d, CategoricalDistribution::uniform(10)), 0.01);
}

TEST(RandomTask, RejectsBadParameters) {
  Rng rng(1);
  EXPECT_THROW(random_task(4, 2, 0.0, rng), ParameterError);
  EXPECT_THROW(random_task(4, 2, -1.0, rng), ParameterError);
  EXPECT_THROW(random_task(1, 2, 1.0, rng), ParameterError);
  EXPECT_THROW(random_task(4, 0, 1.0, rng), ParameterError);
}

TEST(Rng, GammaMomentsMatch) {
  // Gamma(a, 1) has mean a and variance a.
  for (double shape : {0.3, 1.0, 4.5}) {
    Rng rng(2024);
    const int n = 200'000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      sum += g;
      sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    EXPECT_NEAR(mean, shape, 5 * std::sqrt(shape / n)) << shape;
    EXPECT_NEAR(var, shape, 0.05 * shape + 0.01) << shape;
  }
}

TEST(Rng, DerivedStreamsDiffer) {
  Rng a = Rng::derive(1, 0), b = Rng::derive(1, 1), c = Rng::derive(1, 0);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_EQ(x, c.next_u64());
}
