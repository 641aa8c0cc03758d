#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bolab/amplitudes.hpp"
#include "bolab/functionals.hpp"
#include "bolab/radial_law.hpp"
#include "bolab/renorm.hpp"
#include "bolab/state.hpp"
#include "bolab/stats.hpp"

namespace bolab {

/// mu_N: amplitudes, radial law and truncation.
struct EnsembleSpec {
  AmplitudeSequence amps = AmplitudeSequence::power(1.0);
  RadialLaw law = RadialLaw::gaussian();
  std::size_t N = 1;
};

enum class FlowKind {
  truncated,     ///< Phi_N(t)
  renormalized,  ///< e^{2 i t n c_N} Phi_N(t)
  broken,        ///< negative control: arguments of Phi_N(t) output scaled by 1.1
};

std::string_view to_string(FlowKind kind);

/// z-score policy shared by every paired test.
inline constexpr double kZThreshold = 3.0;

struct InvarianceSetup {
  EnsembleSpec ensemble;
  FlowKind flow = FlowKind::truncated;
  /// Truncation of the flow; 0 means ensemble.N. Anything else is a dimension mismatch.
  std::size_t flow_truncation = 0;
  std::vector<TestFunctional> functionals = builtin_functionals();
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct InvarianceReport {
  std::string functional;
  double t = 0.0;
  double mean_before = 0.0;
  double mean_after = 0.0;
  double std_error = 0.0;  ///< of the paired difference
  double z_score = 0.0;
  bool pass = true;        ///< |z| <= 3
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
};

/// Applies one of the flows to a state drawn from mu_N. `ctx` is required for renormalized.
BirkhoffState apply_flow(FlowKind kind, const BirkhoffState& state, std::size_t N, double t,
                         const RenormContext* ctx = nullptr);

/// Paired Monte-Carlo test of E F(flow(zeta)) = E F(zeta) under mu_N, one report per functional.
std::vector<InvarianceReport> invariance_test(const InvarianceSetup& setup, double t);

/// Same draws reused for several times; result[i] belongs to times[i].
std::vector<std::vector<InvarianceReport>> invariance_test(const InvarianceSetup& setup,
                                                           std::span<const double> times);

enum class TwoSampleStatistic { energy_distance, per_marginal_ks };

struct TwoSampleResult {
  double distance = 0.0;
  double p_value = 1.0;
};

/// Energy distance on the first 8 real coordinates (Re/Im of modes 1..4) with a
/// permutation p-value, or per-marginal KS on every Re/Im coordinate with a
/// Bonferroni-corrected minimum p-value. Ensembles must share the same length.
TwoSampleResult two_sample_test(std::span<const BirkhoffState> a, std::span<const BirkhoffState> b,
                                TwoSampleStatistic statistic, std::uint64_t seed,
                                std::size_t permutations = 1000, std::size_t workers = 1);

/// Draws `count` states from mu_N, sample i from stream (seed, i).
std::vector<BirkhoffState> draw_ensemble(const EnsembleSpec& spec, std::size_t count, std::uint64_t seed,
                                         std::size_t workers = 1);

struct WeakConvergencePoint {
  std::size_t N = 0;
  MeanEstimate estimate;
  double z_vs_reference = 0.0;
  bool within_3sigma = true;
  /// Bit-identical to the previous grid estimate (expected once N >= arity).
  bool exact_repeat = false;
};

struct WeakConvergenceReport {
  std::string functional;
  std::size_t arity = 0;
  std::size_t reference_N = 0;
  MeanEstimate reference;
  std::vector<WeakConvergencePoint> points;

  /// Every point with N >= arity agrees with the reference within 3 sigma, and
  /// consecutive points beyond the arity are exact repeats.
  bool stabilized() const;
};

/// Monte-Carlo estimates of int F d mu_N along `grid` and a reference at N_ref.
///
/// All grid points share common random numbers (mode n of sample i is the same
/// draw for every N), so mode-local functionals give identical estimates once N
/// reaches their arity. The reference uses an independent stream.
WeakConvergenceReport weak_convergence_test(const AmplitudeSequence& amps, const RadialLaw& law,
                                            const TestFunctional& functional,
                                            std::span<const std::size_t> grid, std::size_t N_ref,
                                            std::size_t samples, std::uint64_t seed,
                                            std::size_t workers = 1);

}  // namespace bolab
