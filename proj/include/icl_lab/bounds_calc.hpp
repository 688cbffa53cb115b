#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace icl_lab {

/// Shared parameters for all sample-size calculators. Integer fields not used
/// by a given calculator are ignored by it (but still validated to be >= 1).
struct BoundParams {
  std::uint64_t V = 2;   // vocabulary size
  std::uint64_t m = 1;   // number of contexts
  std::uint64_t d = 1;   // input dimension
  std::uint64_t l = 1;   // output sequence length
  double epsilon = 0.1;  // L1 error tolerance, in (0, 2]
  double delta = 0.05;   // failure probability, in (0, 1)
  double constant = 1.0; // multiplier for big-O mode

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

enum class BoundMode { big_o, exact };

std::string_view to_string(BoundMode mode);
BoundMode parse_bound_mode(std::string_view text);

struct BoundResult {
  std::uint64_t per_context = 1;
  std::uint64_t total = 1;
  BoundMode mode = BoundMode::big_o;
  std::string formula_text;
  double raw_value = 0.0;  // real-valued bound before ceil
};

/// Per-context sample count for next-token estimation over m contexts.
///
/// big_o: n_i = ceil(c * V / eps^2 * ln(m / delta))
/// exact: n_i = ceil(V^2 / (2 eps^2) * ln(2 V m / delta)), the Hoeffding chain
///        with per-token tolerance eps/V, a union bound over V tokens, and
///        per-context failure probability delta/m. The constant is not applied.
///
/// total = m * n_i. Logs are natural.
BoundResult textgen_samples_per_context(const BoundParams& params, BoundMode mode);

/// ceil(c * d / eps). Deterministic coreset size; no delta enters.
std::uint64_t coreset_size(const BoundParams& params);

/// ceil(c / eps^2 * ln(1 / delta)). Context size for the k-NN local model.
std::uint64_t knn_context_size(const BoundParams& params);

/// ceil(c * l ln(V) / eps^2 * ln(1 / delta)). Examples per context for
/// length-l generation viewed as classification over V^l sequences.
std::uint64_t bounded_textgen_size(const BoundParams& params);

/// c / sqrt(subset_size). Extra error from estimating on a subset of the data.
double subset_penalty(std::uint64_t subset_size, double constant = 1.0);

/// Same calculators wrapped as BoundResult for reporting; `kind` is one of
/// textgen, coreset, knn, bounded_textgen.
BoundResult calculate(std::string_view kind, const BoundParams& params, BoundMode mode);

namespace detail {
/// Real-valued bounded-textgen bound with a continuous vocabulary size.
double bounded_textgen_raw(double l, double vocab_size, double epsilon, double delta,
                           double constant);
/// ceil applied after all real arithmetic; values within 1e-12 relative of an
/// integer snap to it so exact-integer inputs like ln(e) do not round up.
std::uint64_t ceil_count(double value);
}  // namespace detail

}  // namespace icl_lab
