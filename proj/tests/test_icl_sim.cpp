#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "icl_lab/errors.hpp"
#include "icl_lab/icl_sim.hpp"

using namespace icl_lab;

namespace {

std::vector<double> as_vec(const CategoricalDistribution& d) { return {d.probs().begin(), d.probs().end()}; }

}  // namespace

TEST(EtaModel, Validation) {
  EXPECT_NO_THROW(EtaModel::none().validate());
  EXPECT_THROW(EtaModel::uniform_mix(1.0), ParameterError);
  EXPECT_THROW(EtaModel::uniform_mix(-0.1), ParameterError);
  EXPECT_THROW((EtaModel{EtaModel::Kind::none, 0.2}.validate()), ParameterError);
  EXPECT_EQ(parse_eta_kind("uniform_mix"), EtaModel::Kind::uniform_mix);
}

TEST(IclTextgenDist, Examples) {
  const Vocabulary vocab = Vocabulary::with_size(2);
  IclPromptSamples prompt;
  prompt.per_context[0] = {0, 0, 1, 1};
  prompt.per_context[1] = {0, 0, 0};
  EXPECT_EQ(as_vec(icl_textgen_dist(prompt, Context{0}, vocab, EtaModel::none())), (std::vector<double>{0.5, 0.5}));

  const auto mixed = icl_textgen_dist(prompt, Context{1}, vocab, EtaModel::uniform_mix(0.2));
  EXPECT_NEAR(mixed[0], 0.9, 1e-15);
  EXPECT_NEAR(mixed[1], 0.1, 1e-15);

  EXPECT_THROW(icl_textgen_dist(prompt, Context{7}, vocab, EtaModel::none()), MissingContextError);
}

TEST(IclTextgenDist, OracleProperties) {
  Rng rng(100);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t V = 2 + rng.below(20);
    const Vocabulary vocab = Vocabulary::with_size(V);
    IclPromptSamples prompt;
    auto& s = prompt.per_context[3];
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t j = 0; j < n; ++j) s.push_back(rng.below(V));
    const auto p_hat = empirical_distribution(s, V);

    EXPECT_EQ(l1_distance(icl_textgen_dist(prompt, Context{3}, vocab, EtaModel::none()), p_hat), 0.0);

    const double eta = 0.999 * rng.uniform();
    const auto out = icl_textgen_dist(prompt, Context{3}, vocab, EtaModel::uniform_mix(eta));
    double sum = 0.0;
    for (double p : out.probs()) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_LE(l1_distance(out, p_hat), 2.0 * eta + 1e-12);
  }
}

TEST(SequenceSpace, ExplosionLimit) {
  EXPECT_EQ(sequence_space_size(5, 2), 25u);
  EXPECT_EQ(sequence_space_size(10, 6), 1'000'000u);
  EXPECT_THROW(sequence_space_size(10, 7), SizeError);
  EXPECT_THROW(sequence_space_size(50'000, 2), SizeError);
  EXPECT_THROW(sequence_space_size(4, 3, 63), SizeError);
}

TEST(IclSequenceDist, CountingExample) {
  const Vocabulary vocab = Vocabulary::with_size(2);
  IclPromptSamples prompt;
  prompt.sequences[0] = {{0, 0}, {0, 0}, {1, 1}, {1, 1}};
  const auto d = icl_sequence_dist(prompt, Context{0}, vocab, 2, EtaModel::none());
  EXPECT_EQ(as_vec(d.joint), (std::vector<double>{0.5, 0.0, 0.0, 0.5}));
  EXPECT_EQ(d.encode(std::vector<TokenIndex>{1, 0}), 2u);
  EXPECT_EQ(d.decode(2), (TokenSequence{1, 0}));

  prompt.sequences[1] = {{1, 0}, {1, 0}, {1, 0}};
  const auto point = icl_sequence_dist(prompt, Context{1}, vocab, 2, EtaModel::none());
  EXPECT_EQ(point.joint[2], 1.0);

  EXPECT_THROW(icl_sequence_dist(prompt, Context{5}, vocab, 2, EtaModel::none()), MissingContextError);
  prompt.sequences[2] = {{1, 0, 1}};
  EXPECT_THROW(icl_sequence_dist(prompt, Context{2}, vocab, 2, EtaModel::none()), DimensionError);
  EXPECT_THROW(icl_sequence_dist(prompt, Context{0}, Vocabulary::with_size(1000), 3, EtaModel::none()), SizeError);
}

TEST(IclSequenceDist, LengthOneReducesToTokenOracle) {
  Rng rng(4);
  const Vocabulary vocab = Vocabulary::with_size(6);
  for (int i = 0; i < 200; ++i) {
    IclPromptSamples prompt;
    for (int j = 0; j < 30; ++j) {
      const TokenIndex t = rng.below(6);
      prompt.per_context[0].push_back(t);
      prompt.sequences[0].push_back({t});
    }
    const EtaModel eta = EtaModel::uniform_mix(0.5 * rng.uniform());
    const auto seq = icl_sequence_dist(prompt, Context{0}, vocab, 1, eta);
    const auto tok = icl_textgen_dist(prompt, Context{0}, vocab, eta);
    EXPECT_LT(l1_distance(seq.joint, tok), 1e-15);
  }
}

TEST(IclSequenceDist, FirstMarginalMatchesFirstTokenCounts) {
  Rng rng(5);
  const Vocabulary vocab = Vocabulary::with_size(3);
  for (int i = 0; i < 200; ++i) {
    IclPromptSamples prompt;
    const std::size_t l = 1 + rng.below(4);
    for (int j = 0; j < 25; ++j) {
      TokenSequence s(l);
      for (auto& t : s) t = rng.below(3);
      prompt.per_context[0].push_back(s[0]);
      prompt.sequences[0].push_back(s);
    }
    const auto seq = icl_sequence_dist(prompt, Context{0}, vocab, l, EtaModel::none());
    EXPECT_LT(l1_distance(seq.marginal(0), icl_textgen_dist(prompt, Context{0}, vocab, EtaModel::none())),
              1e-12);
  }
}

TEST(IclClassifyProb, Examples) {
  // All labels 1: probability above one half anywhere in the hull.
  const LabeledDataset ones(2, {{{0.0, 0.0}, 1}, {{1.0, 0.0}, 1}, {{0.0, 1.0}, 1}});
  const TrainConfig cfg{1.0, 500, 1e-8, 1e-2};
  for (auto q : {std::vector<double>{0.2, 0.2}, std::vector<double>{0.5, 0.4}, std::vector<double>{0.0, 0.9}}) {
    EXPECT_GT(icl_classify_prob(ones, q, cfg, EtaModel::none()), 0.5);
  }
  EXPECT_DOUBLE_EQ(apply_eta(1.0, EtaModel::uniform_mix(0.2)), 0.9);
  const std::vector<double> q{0.3, 0.3};
  EXPECT_EQ(icl_classify_prob(ones, q, cfg, EtaModel::uniform_mix(0.1)),
            icl_classify_prob(ones, q, cfg, EtaModel::uniform_mix(0.1)));
  EXPECT_THROW(icl_classify_prob(ones, std::vector<double>{1.0}, cfg, EtaModel::none()), DimensionError);
}

TEST(IclClassifyProb, MixtureShiftAtMostHalfEta) {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform();
    const double eta = 0.999 * rng.uniform();
    const double out = apply_eta(p, EtaModel::uniform_mix(eta));
    EXPECT_LE(std::abs(out - p), 0.5 * eta + 1e-15);
    EXPECT_GT(out, -1e-15);
    EXPECT_LT(out, 1.0 + 1e-15);
  }
}
