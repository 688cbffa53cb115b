#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "icl_lab/classify.hpp"
#include "icl_lab/dist_core.hpp"

namespace icl_lab {

/// Idealized in-context-learning error. With uniform_mix the oracle returns
/// (1 - eta) * ideal + eta * uniform, which moves a distribution by at most
/// 2 eta in L1 and a binary probability by at most eta / 2.
struct EtaModel {
  enum class Kind { none, uniform_mix };

  Kind kind = Kind::none;
  double eta = 0.0;

  static EtaModel none() { return {}; }
  static EtaModel uniform_mix(double eta);

  /// eta in [0, 1); eta == 0 when kind == none.
  void validate() const;
  double effective() const noexcept { return kind == Kind::none ? 0.0 : eta; }
};

std::string_view to_string(EtaModel::Kind kind);
EtaModel::Kind parse_eta_kind(std::string_view text);

using TokenSequence = std::vector<TokenIndex>;

/// Examples placed in a prompt, keyed by context id.
struct IclPromptSamples {
  std::map<std::size_t, std::vector<TokenIndex>> per_context;
  std::map<std::size_t, std::vector<TokenSequence>> sequences;
};

/// Default cap on V^l for dense sequence distributions.
inline constexpr std::size_t kDefaultExplosionLimit = 1'000'000;

/// Dense distribution over V^l sequences. Sequence (t_0, ..., t_{l-1}) has
/// index sum t_i V^(l-1-i): the first token is the most significant digit.
struct SequenceDistribution {
  std::size_t vocab_size = 0;
  std::size_t length = 0;
  CategoricalDistribution joint;

  std::size_t encode(std::span<const TokenIndex> seq) const;
  TokenSequence decode(std::size_t index) const;
  /// Marginal distribution of the token at `position`.
  CategoricalDistribution marginal(std::size_t position) const;
};

/// V^l, or SizeError if it exceeds `limit`.
std::size_t sequence_space_size(std::size_t vocab_size, std::size_t length,
                                std::size_t limit = kDefaultExplosionLimit);

CategoricalDistribution apply_eta(const CategoricalDistribution& ideal, const EtaModel& eta);
double apply_eta(double prob, const EtaModel& eta);

/// Oracle next-token distribution: the empirical distribution of the context's
/// prompt samples, mixed with uniform per `eta`.
CategoricalDistribution icl_textgen_dist(const IclPromptSamples& prompt, const Context& context,
                                         const Vocabulary& vocab, const EtaModel& eta);

/// Oracle length-l sequence distribution: empirical over whole sequences,
/// mixed with uniform over V^l per `eta`.
SequenceDistribution icl_sequence_dist(const IclPromptSamples& prompt, const Context& context,
                                       const Vocabulary& vocab, std::size_t length,
                                       const EtaModel& eta,
                                       std::size_t explosion_limit = kDefaultExplosionLimit);

/// Local classifier the oracle imitates: logistic model fit on the prompt
/// subset once, queried many times.
class IclClassifier {
 public:
  IclClassifier(const LabeledDataset& subset, const TrainConfig& cfg, const EtaModel& eta);

  double prob(std::span<const double> query) const;
  const LinearModel& local_model() const noexcept { return model_; }

 private:
  LinearModel model_;
  EtaModel eta_;
};

/// (1 - eta) * sigma(w'.x + b') + eta / 2, with (w', b') trained on `subset`.
double icl_classify_prob(const LabeledDataset& subset, std::span<const double> query,
                         const TrainConfig& cfg, const EtaModel& eta);

}  // namespace icl_lab
