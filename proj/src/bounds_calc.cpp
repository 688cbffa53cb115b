#include "icl_lab/bounds_calc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "icl_lab/errors.hpp"

namespace icl_lab {

namespace {

void require_count(std::uint64_t value, const char* name) {
  if (value < 1) throw ParameterError(std::string(name) + " must be at least 1");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

void BoundParams::validate() const {
  require_count(V, "V");
  require_count(m, "m");
  require_count(d, "d");
  require_count(l, "l");
  if (!(epsilon > 0.0) || epsilon > 2.0) throw ParameterError("epsilon must lie in (0, 2]");
  if (!(delta > 0.0) || !(delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (!(constant > 0.0) || !std::isfinite(constant)) {
    throw ParameterError("constant must be a positive finite real");
  }
}

std::string_view to_string(BoundMode mode) {
  return mode == BoundMode::exact ? "exact" : "bigo";
}

BoundMode parse_bound_mode(std::string_view text) {
  if (text == "exact") return BoundMode::exact;
  if (text == "bigo" || text == "big_o") return BoundMode::big_o;
  throw ParameterError("unknown bound mode '" + std::string(text) + "' (expected exact or bigo)");
}

namespace detail {

std::uint64_t ceil_count(double value) {
  if (!std::isfinite(value) || value > 1.8e19) throw ParameterError("bound overflows a 64-bit count");
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-12 * std::max(1.0, std::abs(value))) {
    return nearest < 1.0 ? 1 : static_cast<std::uint64_t>(nearest);
  }
  const double c = std::ceil(value);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

double bounded_textgen_raw(double l, double vocab_size, double epsilon, double delta,
                           double constant) {
  return constant * (l * std::log(vocab_size) / (epsilon * epsilon)) * std::log(1.0 / delta);
}

}  // namespace detail

BoundResult textgen_samples_per_context(const BoundParams& params, BoundMode mode) {
  params.validate();
  const double V = static_cast<double>(params.V);
  const double m = static_cast<double>(params.m);
  const double eps2 = params.epsilon * params.epsilon;

  BoundResult result;
  result.mode = mode;
  if (mode == BoundMode::big_o) {
    const double log_arg = m / params.delta;
    if (!(log_arg > 1.0)) {
      throw ParameterError("ln(m/delta) must be positive: m/delta = " + fmt(log_arg) +
                           " <= 1 leaves no failure budget to split across contexts");
    }
    result.raw_value = params.constant * (V / eps2) * std::log(log_arg);
    result.formula_text = "n_i = ceil(c * V / eps^2 * ln(m / delta)), natural log; c = " +
                          fmt(params.constant);
  } else {
    const double log_arg = 2.0 * V * m / params.delta;
    if (!(log_arg > 1.0)) {
      throw ParameterError("ln(2 V m / delta) must be positive: argument " + fmt(log_arg) + " <= 1");
    }
    result.raw_value = (V * V / (2.0 * eps2)) * std::log(log_arg);
    result.formula_text =
        "n_i = ceil(V^2 / (2 eps^2) * ln(2 V m / delta)), natural log; Hoeffding per token at "
        "eps/V, union bound over V tokens, delta_i = delta/m";
  }
  result.per_context = detail::ceil_count(result.raw_value);
  result.total = params.m * result.per_context;
  return result;
}

std::uint64_t coreset_size(const BoundParams& params) {
  params.validate();
  return detail::ceil_count(params.constant * static_cast<double>(params.d) / params.epsilon);
}

std::uint64_t knn_context_size(const BoundParams& params) {
  params.validate();
  return detail::ceil_count(params.constant / (params.epsilon * params.epsilon) *
                            std::log(1.0 / params.delta));
}

std::uint64_t bounded_textgen_size(const BoundParams& params) {
  params.validate();
  if (params.V < 2) throw ParameterError("bounded_textgen_size: V must be at least 2");
  return detail::ceil_count(detail::bounded_textgen_raw(static_cast<double>(params.l),
                                                        static_cast<double>(params.V),
                                                        params.epsilon, params.delta,
                                                        params.constant));
}

double subset_penalty(std::uint64_t subset_size, double constant) {
  if (subset_size < 1) throw ParameterError("subset_penalty: subset size must be at least 1");
  if (!(constant > 0.0)) throw ParameterError("subset_penalty: constant must be positive");
  return constant / std::sqrt(static_cast<double>(subset_size));
}

BoundResult calculate(std::string_view kind, const BoundParams& params, BoundMode mode) {
  if (kind == "textgen") return textgen_samples_per_context(params, mode);

  BoundResult r;
  r.mode = BoundMode::big_o;
  const std::string c = fmt(params.constant);
  if (kind == "coreset") {
    r.per_context = coreset_size(params);
    r.raw_value = params.constant * static_cast<double>(params.d) / params.epsilon;
    r.total = r.per_context;
    r.formula_text = "|D'| = ceil(c * d / eps); c = " + c;
  } else if (kind == "knn") {
    r.per_context = knn_context_size(params);
    r.raw_value = params.constant / (params.epsilon * params.epsilon) * std::log(1.0 / params.delta);
    r.total = r.per_context;
    r.formula_text = "k = ceil(c / eps^2 * ln(1 / delta)), natural log; c = " + c;
  } else if (kind == "bounded_textgen") {
    r.per_context = bounded_textgen_size(params);
    r.raw_value = detail::bounded_textgen_raw(static_cast<double>(params.l),
                                              static_cast<double>(params.V), params.epsilon,
                                              params.delta, params.constant);
    r.total = params.m * r.per_context;
    r.formula_text = "k = ceil(c * l ln(V) / eps^2 * ln(1 / delta)), natural log; c = " + c;
  } else {
    throw ParameterError("unknown bound kind '" + std::string(kind) +
                         "' (expected textgen, coreset, knn, bounded_textgen)");
  }
  return r;
}

}  // namespace icl_lab
