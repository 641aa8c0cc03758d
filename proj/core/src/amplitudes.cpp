#include "bolab/amplitudes.hpp"

#include <cmath>

#include "bolab/error.hpp"
#include "bolab/state.hpp"

namespace bolab {

std::string_view to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::diverges: return "diverges";
    case SeriesVerdict::converges: return "converges";
    case SeriesVerdict::undecided: return "undecided";
  }
  return "undecided";
}

SeriesVerdict classify_power_log_series(double exponent, double log_power) {
  constexpr double tol = 1e-12;
  if (exponent > -1.0 + tol) return SeriesVerdict::diverges;
  if (exponent < -1.0 - tol) return SeriesVerdict::converges;
  return log_power <= 1.0 + tol ? SeriesVerdict::diverges : SeriesVerdict::converges;
}

AmplitudeSequence::AmplitudeSequence(Rule rule, double p, double q, std::vector<double> values)
    : rule_(rule), p_(p), q_(q), values_(std::move(values)) {
  if (!std::isfinite(p_) || !std::isfinite(q_)) {
    throw InvalidArgument("AmplitudeSequence: exponents must be finite");
  }
}

AmplitudeSequence AmplitudeSequence::power_log(double p, double q) {
  return {Rule::power_log, p, q, {}};
}

AmplitudeSequence AmplitudeSequence::power(double p) { return {Rule::power, p, 0.0, {}}; }

AmplitudeSequence AmplitudeSequence::explicit_list(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("AmplitudeSequence: explicit list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0 || !std::isfinite(values[i])) {
      throw InvalidArgument("AmplitudeSequence: amplitude " + std::to_string(i + 1) +
                            " must be nonzero and finite");
    }
  }
  return {Rule::explicit_list, 0.0, 0.0, std::move(values)};
}

std::string AmplitudeSequence::name() const {
  switch (rule_) {
    case Rule::power_log: return "power_log";
    case Rule::power: return "power";
    case Rule::explicit_list: return "explicit";
  }
  return "explicit";
}

std::string AmplitudeSequence::describe() const {
  switch (rule_) {
    case Rule::power_log:
      return "power_log(p=" + format_double(p_) + ",q=" + format_double(q_) + ")";
    case Rule::power: return "power(p=" + format_double(p_) + ")";
    case Rule::explicit_list: return "explicit(len=" + std::to_string(values_.size()) + ")";
  }
  return {};
}

double AmplitudeSequence::operator()(std::size_t n) const {
  if (n == 0) throw InvalidArgument("AmplitudeSequence: modes start at 1");
  const double x = static_cast<double>(n);
  switch (rule_) {
    case Rule::power: return std::pow(x, -p_);
    case Rule::power_log: return std::pow(x, -p_) / std::pow(std::log(x + 1.0), q_);
    case Rule::explicit_list:
      if (n > values_.size()) {
        throw InvalidArgument("AmplitudeSequence: explicit list has only " +
                              std::to_string(values_.size()) + " modes");
      }
      return values_[n - 1];
  }
  return 0.0;
}

std::vector<double> AmplitudeSequence::values(std::size_t N) const {
  std::vector<double> out(N);
  for (std::size_t n = 1; n <= N; ++n) out[n - 1] = (*this)(n);
  return out;
}

std::optional<std::size_t> AmplitudeSequence::max_mode() const {
  if (rule_ == Rule::explicit_list) return values_.size();
  return std::nullopt;
}

SeriesVerdict AmplitudeSequence::classify(double power, double weight_exponent) const {
  if (rule_ == Rule::explicit_list) return SeriesVerdict::undecided;
  return classify_power_log_series(weight_exponent - power * p_, power * q_);
}

}  // namespace bolab
