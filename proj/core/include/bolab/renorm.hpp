#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bolab/amplitudes.hpp"
#include "bolab/radial_law.hpp"
#include "bolab/state.hpp"

namespace bolab {

/// Amplitudes alpha_n with sum |alpha_n|^2 = inf and sum |alpha_n|^4 < inf, paired
/// with a law normalized to E|g|^2 = 1.
class RenormContext {
 public:
  /// Throws InvalidArgument when either series condition fails (checked analytically
  /// from the rule's exponents) or when |E|g|^2 - 1| > 1e-12.
  RenormContext(AmplitudeSequence amps, RadialLaw law);

  const AmplitudeSequence& amps() const noexcept { return amps_; }
  const RadialLaw& law() const noexcept { return law_; }

  /// C = E|g|^4 - (E|g|^2)^2, the variance of |g|^2.
  double action_variance() const;

  /// sum_{k<=N} |alpha_k|^2. Prefix sums are cached; safe to call concurrently.
  double renorm_constant(std::size_t N) const;

 private:
  struct PrefixCache {
    std::mutex mutex;
    std::vector<double> prefix{0.0};  // prefix[k] = sum_{j<=k} |alpha_j|^2
  };
  AmplitudeSequence amps_;
  RadialLaw law_;
  std::shared_ptr<PrefixCache> cache_;
};

/// c_N = sum_{k<=N} |alpha_k|^2
double renorm_constant(const RenormContext& ctx, std::size_t N);

/// S_N = sum_{k<=N} (|zeta_k|^2 - |alpha_k|^2), evaluated as sum |zeta_k|^2 - c_N.
/// Requires N <= length.
double centered_sum(const BirkhoffState& state, const RenormContext& ctx, std::size_t N);

/// beta_{N,n}(pi_N zeta) + 2 n c_N, evaluated as n^2 - 2 sum_{k<=n} (k-n)|zeta_k|^2 - 2 n S_N.
double limit_phase(const BirkhoffState& state, const RenormContext& ctx, std::size_t n, std::size_t N);

/// All renormalized phases n = 1..N in O(N).
std::vector<double> limit_phases(const BirkhoffState& state, const RenormContext& ctx, std::size_t N);

/// (zeta_n exp(i t (beta_{N,n} + 2 n c_N)))_{n<=N}.
BirkhoffState renorm_flow(const BirkhoffState& state, const RenormContext& ctx, std::size_t N, double t);

struct GridIncrement {
  std::size_t from = 0;
  std::size_t to = 0;
  double empirical_centered_var = 0.0;   ///< Var(S_to - S_from)
  double predicted_centered_var = 0.0;   ///< C sum_{from<k<=to} |alpha_k|^4
  double centered_ratio = 0.0;
  double empirical_phase_msq = 0.0;      ///< E (phase(to) - phase(from))^2
  double phase_msq_std_error = 0.0;
  double predicted_phase_msq = 0.0;      ///< (2n)^2 C sum |alpha_k|^4
  double phase_ratio = 0.0;
  /// E ||renorm_flow_to - renorm_flow_from||_{h^-1} at options.flow_time; 0 unless tracked.
  double mean_hminus1_distance = 0.0;
};

struct PhaseDiagnostic {
  std::size_t mode = 1;
  std::vector<std::size_t> grid;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double flow_time = 1.0;
  std::vector<GridIncrement> increments;
  /// samples x grid.size(), row-major; filled only when requested.
  std::vector<double> trajectories;

  /// Every phase ratio within `tolerance` of 1.
  bool phases_within(double tolerance) const;
  bool centered_within(double tolerance) const;
};

struct PhaseDiagnosticOptions {
  bool keep_trajectories = false;
  /// Also measure the h^{-1} Cauchy increments of the whole renormalized flow.
  bool track_hminus1 = false;
  double flow_time = 1.0;
  std::size_t workers = 1;
};

/// Cauchy behaviour of the renormalized phase of mode n along an increasing N grid,
/// over `samples` independent draws from mu at the largest grid point.
PhaseDiagnostic phase_convergence_diagnostic(const RenormContext& ctx, std::size_t n,
                                             std::span<const std::size_t> grid, std::size_t samples,
                                             std::uint64_t seed, const PhaseDiagnosticOptions& options = {});

}  // namespace bolab
