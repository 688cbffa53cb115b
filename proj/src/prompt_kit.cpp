#include "icl_lab/prompt_kit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "icl_lab/errors.hpp"

namespace icl_lab {

void PromptConfig::validate() const {
  if (separator.empty()) throw ParameterError("prompt separator must be non-empty");
}

std::string build_prompt(std::span<const ExamplePair> pairs, std::string_view query,
                         const PromptConfig& cfg) {
  cfg.validate();
  if (query.empty()) throw ParameterError("prompt query must be non-empty");
  std::string p;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    p += pairs[i].input_text;
    p += cfg.pair_joiner;
    p += pairs[i].output_text;
    const bool last = i + 1 == pairs.size();
    if (!last || cfg.trailing_separator_before_query) {
      p += cfg.pair_joiner;
      p += cfg.separator;
    }
    p += cfg.pair_joiner;
  }
  p += query;
  return p;
}

std::vector<std::string> separator_collisions(std::span<const ExamplePair> pairs,
                                              std::string_view query, const PromptConfig& cfg) {
  std::vector<std::string> warnings;
  auto check = [&](std::string_view text, const std::string& where) {
    if (text.find(cfg.separator) != std::string_view::npos) {
      warnings.push_back(where + " contains the separator '" + cfg.separator + "'");
    }
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    check(pairs[i].input_text, "pair " + std::to_string(i) + " input");
    check(pairs[i].output_text, "pair " + std::to_string(i) + " output");
  }
  check(query, "query");
  return warnings;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (c < 0x80 && (std::isspace(c) || std::ispunct(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_similarity: dimensions differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw ZeroVectorError("cosine similarity of a zero vector is undefined");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::vector<double> embed_text(std::string_view text, std::size_t dim) {
  if (dim < 8) throw ParameterError("embedding dimension must be at least 8");
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw ZeroVectorError("text has no tokens to embed");
  std::vector<double> v(dim, 0.0);
  for (const auto& t : tokens) v[fnv1a64(t) % dim] += 1.0;
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  for (double& x : v) x /= norm;
  return v;
}

std::vector<ExamplePair> similarity_select(std::span<const ExamplePair> pairs, std::string_view query,
                                           std::size_t k, std::size_t dim) {
  if (k < 1 || k > pairs.size()) {
    throw ParameterError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(pairs.size()) +
                         "]");
  }
  const auto q = embed_text(query, dim);
  std::vector<double> sim(pairs.size(), 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (tokenize(pairs[i].input_text).empty()) continue;
    sim[i] = cosine_similarity(embed_text(pairs[i].input_text, dim), q);
  }

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
  order.resize(k);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sim[a] != sim[b] ? sim[a] < sim[b] : a < b;
  });

  std::vector<ExamplePair> out;
  out.reserve(k);
  for (std::size_t i : order) out.push_back(pairs[i]);
  return out;
}

}  // namespace icl_lab
