#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bolab/functionals.hpp"
#include "bolab/state.hpp"

namespace bolab {

/// Continuous, compactly supported, nonnegative cutoff chi.
struct CutoffProfile {
  enum class Kind {
    triangular,  ///< 1 - |x|/a on [-a, a]
    plateau,     ///< 1 on [-a, a], linear down to 0 on a < |x| < a + ramp
  };
  Kind kind = Kind::triangular;
  double a = 2.0;
  double ramp = 1.0;

  double operator()(double x) const;
};

struct GibbsSpec {
  std::size_t N = 16;
  CutoffProfile cutoff;
  /// c_1, c_2, ... ; empty selects the harmonic rule c_N = sum_{k<=N} 1/k.
  std::vector<double> explicit_constants;

  /// Throws InvalidArgument on a non-admissible spec (N = 0, a <= 0, short list).
  void validate() const;
  double renorm_constant() const;
};

struct GibbsWeight {
  double log_weight = 0.0;    ///< sum_{k<=N} (sum_{k<=j<=N} |zeta_j|^2)^2
  double cutoff_value = 0.0;  ///< chi(sum_{n<=N} n |zeta_n|^2 - c_N) > 0
};

/// The density G_N = chi(...) exp(log_weight) in log form; nullopt when chi = 0.
std::optional<GibbsWeight> gibbs_log_density(const BirkhoffState& state, const GibbsSpec& spec);

struct GibbsFunctionalReport {
  std::string functional;
  double weighted_mean_before = 0.0;
  double std_error_before = 0.0;
  double z_zero = 0.0;  ///< weighted_mean_before / std_error_before
  double weighted_mean_after = 0.0;
  double paired_std_error = 0.0;
  double z_paired = 0.0;
  bool pass = true;  ///< |z_paired| <= 3, and |z_zero| <= 3 for phase-sensitive functionals
};

struct GibbsReport {
  std::size_t samples = 0;
  std::size_t retained = 0;  ///< draws with chi > 0
  double effective_sample_size = 0.0;
  double renorm_constant = 0.0;
  double t = 0.0;
  std::uint64_t seed = 0;
  /// max |log G_N(flow(zeta)) - log G_N(zeta)| over retained draws
  double max_log_weight_drift = 0.0;
  std::vector<GibbsFunctionalReport> functionals;
};

/// ESS below which gibbs_weighted_statistics refuses to report.
inline constexpr double kMinEffectiveSampleSize = 50.0;

/// Self-normalized importance sampling of G_N d mu / int G_N d mu with mu built from
/// a standard complex Gaussian and zeta*_n = 1/n, before and after the truncated
/// flow at time t. Throws DegenerateWeightsError when the ESS drops below 50.
GibbsReport gibbs_weighted_statistics(const GibbsSpec& spec, std::span<const TestFunctional> functionals,
                                      std::size_t samples, std::uint64_t seed, double t,
                                      std::size_t workers = 1);

}  // namespace bolab
