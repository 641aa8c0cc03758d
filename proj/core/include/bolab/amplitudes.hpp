#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bolab {

/// Classification of a positive series sum_n a_n.
enum class SeriesVerdict { diverges, converges, undecided };

std::string_view to_string(SeriesVerdict v);

/// sum_n n^{exponent} / log(n+1)^{log_power}: diverges iff exponent > -1, or
/// exponent == -1 and log_power <= 1 (integral test).
SeriesVerdict classify_power_log_series(double exponent, double log_power);

/// Deterministic amplitude rule n -> zeta*_n.
///
///   power_log: n^{-p} / log(n+1)^q
///   power:     n^{-p}
///   explicit:  a user supplied finite list (modes beyond it are rejected)
class AmplitudeSequence {
 public:
  enum class Rule { power_log, power, explicit_list };

  static AmplitudeSequence power_log(double p, double q);
  static AmplitudeSequence power(double p);
  /// Throws InvalidArgument if any entry is zero or non-finite.
  static AmplitudeSequence explicit_list(std::vector<double> values);

  Rule rule() const noexcept { return rule_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  std::string name() const;
  /// Human readable description, e.g. "power_log(p=1,q=1)".
  std::string describe() const;

  /// zeta*_n for n >= 1.
  double operator()(std::size_t n) const;
  std::vector<double> values(std::size_t N) const;

  /// Largest mode the rule can produce (explicit lists are finite).
  std::optional<std::size_t> max_mode() const;

  /// Verdict for sum_n |zeta*_n|^{power} n^{weight_exponent}; undecided for explicit lists.
  SeriesVerdict classify(double power, double weight_exponent) const;

  friend bool operator==(const AmplitudeSequence&, const AmplitudeSequence&) = default;

 private:
  AmplitudeSequence(Rule rule, double p, double q, std::vector<double> values);
  Rule rule_;
  double p_ = 0.0;
  double q_ = 0.0;
  std::vector<double> values_;
};

}  // namespace bolab
