#include "icl_lab/icl_sim.hpp"

#include <cmath>
#include <string>

#include "icl_lab/errors.hpp"

namespace icl_lab {

EtaModel EtaModel::uniform_mix(double eta) {
  EtaModel m{Kind::uniform_mix, eta};
  m.validate();
  return m;
}

void EtaModel::validate() const {
  if (!(eta >= 0.0) || !(eta < 1.0)) throw ParameterError("eta must lie in [0, 1)");
  if (kind == Kind::none && eta != 0.0) throw ParameterError("eta must be 0 when kind is none");
}

std::string_view to_string(EtaModel::Kind kind) {
  return kind == EtaModel::Kind::none ? "none" : "uniform_mix";
}

EtaModel::Kind parse_eta_kind(std::string_view text) {
  if (text == "none") return EtaModel::Kind::none;
  if (text == "uniform_mix") return EtaModel::Kind::uniform_mix;
  throw ParameterError("unknown eta kind '" + std::string(text) + "' (expected none or uniform_mix)");
}

std::size_t SequenceDistribution::encode(std::span<const TokenIndex> seq) const {
  if (seq.size() != length) {
    throw DimensionError("sequence of length " + std::to_string(seq.size()) + ", expected " +
                         std::to_string(length));
  }
  std::size_t index = 0;
  for (TokenIndex t : seq) {
    if (t >= vocab_size) throw IndexError("token " + std::to_string(t) + " out of range");
    index = index * vocab_size + t;
  }
  return index;
}

TokenSequence SequenceDistribution::decode(std::size_t index) const {
  TokenSequence seq(length);
  for (std::size_t i = length; i-- > 0;) {
    seq[i] = index % vocab_size;
    index /= vocab_size;
  }
  return seq;
}

CategoricalDistribution SequenceDistribution::marginal(std::size_t position) const {
  if (position >= length) throw IndexError("marginal position out of range");
  std::vector<double> probs(vocab_size, 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) probs[decode(i)[position]] += joint[i];
  return CategoricalDistribution(std::move(probs));
}

std::size_t sequence_space_size(std::size_t vocab_size, std::size_t length, std::size_t limit) {
  if (length < 1) throw ParameterError("sequence length must be at least 1");
  if (vocab_size < 1) throw ParameterError("vocabulary size must be at least 1");
  std::size_t total = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (total > limit / vocab_size) {
      throw SizeError("V^l = " + std::to_string(vocab_size) + "^" + std::to_string(length) +
                      " exceeds the explosion limit " + std::to_string(limit) +
                      "; use a smaller vocabulary or sequence length");
    }
    total *= vocab_size;
  }
  return total;
}

CategoricalDistribution apply_eta(const CategoricalDistribution& ideal, const EtaModel& eta) {
  eta.validate();
  const double e = eta.effective();
  if (e == 0.0) return ideal;
  const double share = e / static_cast<double>(ideal.size());
  std::vector<double> probs(ideal.size());
  for (std::size_t v = 0; v < ideal.size(); ++v) probs[v] = (1.0 - e) * ideal[v] + share;
  return CategoricalDistribution(std::move(probs));
}

double apply_eta(double prob, const EtaModel& eta) {
  eta.validate();
  const double e = eta.effective();
  return (1.0 - e) * prob + 0.5 * e;
}

CategoricalDistribution icl_textgen_dist(const IclPromptSamples& prompt, const Context& context,
                                         const Vocabulary& vocab, const EtaModel& eta) {
  auto it = prompt.per_context.find(context.id);
  if (it == prompt.per_context.end() || it->second.empty()) {
    throw MissingContextError("prompt has no samples for context " + std::to_string(context.id));
  }
  return apply_eta(empirical_distribution(it->second, vocab), eta);
}

SequenceDistribution icl_sequence_dist(const IclPromptSamples& prompt, const Context& context,
                                       const Vocabulary& vocab, std::size_t length,
                                       const EtaModel& eta, std::size_t explosion_limit) {
  const std::size_t space = sequence_space_size(vocab.size(), length, explosion_limit);
  auto it = prompt.sequences.find(context.id);
  if (it == prompt.sequences.end() || it->second.empty()) {
    throw MissingContextError("prompt has no sequences for context " + std::to_string(context.id));
  }
  SequenceDistribution out{vocab.size(), length, CategoricalDistribution::uniform(space)};
  std::vector<TokenIndex> encoded;
  encoded.reserve(it->second.size());
  for (const auto& seq : it->second) encoded.push_back(out.encode(seq));
  out.joint = apply_eta(empirical_distribution(encoded, space), eta);
  return out;
}

IclClassifier::IclClassifier(const LabeledDataset& subset, const TrainConfig& cfg, const EtaModel& eta)
    : model_(train_logistic(subset, cfg)), eta_(eta) {
  eta_.validate();
}

double IclClassifier::prob(std::span<const double> query) const {
  return apply_eta(predict_prob(model_, query), eta_);
}

double icl_classify_prob(const LabeledDataset& subset, std::span<const double> query,
                         const TrainConfig& cfg, const EtaModel& eta) {
  return IclClassifier(subset, cfg, eta).prob(query);
}

}  // namespace icl_lab
