#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icl_lab {

struct ExamplePair {
  std::string input_text;
  std::string output_text;
};

struct PromptConfig {
  std::string separator = "[SEP]";
  std::string pair_joiner = " ";
  bool trailing_separator_before_query = true;

  void validate() const;
};

/// x_1 J y_1 J SEP J x_2 J y_2 J SEP J ... x_N J y_N J SEP J query, where J is
/// cfg.pair_joiner. With trailing_separator_before_query off, the last SEP
/// before the query is dropped. No pairs gives the query alone.
std::string build_prompt(std::span<const ExamplePair> pairs, std::string_view query,
                         const PromptConfig& cfg = {});

/// Human-readable warnings for every text that contains the separator.
std::vector<std::string> separator_collisions(std::span<const ExamplePair> pairs,
                                              std::string_view query, const PromptConfig& cfg = {});

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Lowercased tokens split on ASCII whitespace and punctuation.
std::vector<std::string> tokenize(std::string_view text);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Hashed bag of tokens: token counts in bucket fnv1a64(token) % dim, L2-normalized.
std::vector<double> embed_text(std::string_view text, std::size_t dim);

/// The k pairs whose inputs are most similar to `query`, returned in ascending
/// similarity so the closest example sits right before the query in a prompt.
/// Ties rank by original index. Inputs without any token score 0.
std::vector<ExamplePair> similarity_select(std::span<const ExamplePair> pairs, std::string_view query,
                                           std::size_t k, std::size_t dim = 1024);

}  // namespace icl_lab
