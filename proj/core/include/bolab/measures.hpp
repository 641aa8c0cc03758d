#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bolab/amplitudes.hpp"
#include "bolab/radial_law.hpp"
#include "bolab/random.hpp"
#include "bolab/state.hpp"
#include "bolab/stats.hpp"

namespace bolab {

/// Stream of sample `index` in an ensemble drawn with `seed`.
inline RandomStream sample_stream(std::uint64_t seed, std::uint64_t index) {
  return RandomStream(seed, index);
}

/// A draw (zeta*_1 g_1, ..., zeta*_N g_N) from mu_N.
///
/// g_n is addressed by slot n of `rng`, so mode n of a given sample is the same
/// for every truncation N >= n.
BirkhoffState sample_state(const AmplitudeSequence& amps, const RadialLaw& law, std::size_t N,
                           const RandomStream& rng);

/// Same draw as above with the amplitudes zeta*_1..zeta*_N precomputed.
BirkhoffState sample_state(std::span<const double> amplitudes, const RadialLaw& law,
                           const RandomStream& rng);

/// E exp(-a |g|^2) for g ~ law, a >= 0. Closed form 1/(1 + a lambda^2) for the
/// Gaussian, adaptive radial quadrature otherwise.
double radial_laplace(const RadialLaw& law, double a);
/// Always by quadrature (relative tolerance 1e-10, QuadratureError otherwise).
double radial_laplace_quadrature(const RadialLaw& law, double a);

struct TailMassProfile {
  std::vector<double> factors;       ///< factor n = 1..N
  std::vector<double> log_products;  ///< log of the product up to n
  std::vector<double> partial_sums;  ///< sum_{k<=n} |zeta*_k|^2 k^{2 sigma}
};

/// prod_{n<=N} int exp(-|zeta*_n|^2 (x^2+y^2) n^{2 sigma}) f(x,y) dx dy. N = 0 gives 1.
double tail_mass_product(const AmplitudeSequence& amps, SobolevIndex sigma, std::size_t N,
                         const RadialLaw& law);
TailMassProfile tail_mass_profile(const AmplitudeSequence& amps, SobolevIndex sigma, std::size_t N,
                                  const RadialLaw& law);

struct SigmaClassification {
  SeriesVerdict verdict = SeriesVerdict::undecided;
  /// (N, sum_{n<=N} |zeta*_n|^2 n^{2 sigma}) on N = 1, 2, 4, ..., and N_max.
  std::vector<std::pair<std::size_t, double>> partial_sums;
};

/// Whether sum |zeta*_n|^2 n^{2 sigma} diverges, i.e. whether mu(h^sigma) = 0.
SigmaClassification classify_sigma(const AmplitudeSequence& amps, SobolevIndex sigma, std::size_t N_max);

struct BallEstimate {
  double estimate = 0.0;
  Interval interval;
  std::size_t hits = 0;
  std::size_t samples = 0;
  /// The centre's mass beyond N already exceeds eps: every draw misses.
  bool increase_truncation = false;
};

/// Monte-Carlo estimate of mu_N(||zeta - center||_{h^s} < eps) with a Wilson 95% interval.
BallEstimate ball_probability(const AmplitudeSequence& amps, const RadialLaw& law,
                              const BirkhoffState& center, double eps, SobolevIndex s, std::size_t N,
                              std::size_t samples, std::uint64_t seed, std::size_t workers = 1);

}  // namespace bolab
