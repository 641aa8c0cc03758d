#include "bolab/measures.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "bolab/error.hpp"
#include "bolab/parallel.hpp"

namespace bolab {

BirkhoffState sample_state(const AmplitudeSequence& amps, const RadialLaw& law, std::size_t N,
                           const RandomStream& rng) {
  if (N == 0) throw InvalidArgument("sample_state: N must be >= 1");
  std::vector<complex> coeffs(N);
  for (std::size_t n = 1; n <= N; ++n) {
    coeffs[n - 1] = amps(n) * law.sample_at(rng, static_cast<std::uint32_t>(n));
  }
  return BirkhoffState(std::move(coeffs));
}

BirkhoffState sample_state(std::span<const double> amplitudes, const RadialLaw& law,
                           const RandomStream& rng) {
  if (amplitudes.empty()) throw InvalidArgument("sample_state: N must be >= 1");
  std::vector<complex> coeffs(amplitudes.size());
  for (std::size_t n = 1; n <= amplitudes.size(); ++n) {
    coeffs[n - 1] = amplitudes[n - 1] * law.sample_at(rng, static_cast<std::uint32_t>(n));
  }
  return BirkhoffState(std::move(coeffs));
}

double radial_laplace_quadrature(const RadialLaw& law, double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("radial_laplace: a must be finite and >= 0");
  // Substitute r = lambda c y with c = (1 + a lambda^2)^{-1/2} so the integrand has unit width.
  const double lambda = law.scale();
  const double a_unit = a * lambda * lambda;
  const double c = 1.0 / std::sqrt(1.0 + a_unit);
  const RadialLaw unit = RadialLaw::from_name(law.name(), 1.0);
  auto integrand = [&](double y) {
    const double x = c * y;
    return std::exp(-a_unit * x * x) * unit.radius_density(x) * c;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(integrand, 1e-13, &error, &l1);
  if (!std::isfinite(value) || error > 1e-10 * std::abs(value)) {
    throw QuadratureError("radial quadrature did not reach relative tolerance 1e-10 (a = " +
                          std::to_string(a) + ")");
  }
  return value;
}

double radial_laplace(const RadialLaw& law, double a) {
  if (law.family() == RadialLaw::Family::gaussian) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("radial_laplace: a must be finite and >= 0");
    return 1.0 / (1.0 + a * law.scale() * law.scale());
  }
  return radial_laplace_quadrature(law, a);
}

TailMassProfile tail_mass_profile(const AmplitudeSequence& amps, SobolevIndex sigma, std::size_t N,
                                  const RadialLaw& law) {
  TailMassProfile out;
  out.factors.reserve(N);
  out.log_products.reserve(N);
  out.partial_sums.reserve(N);
  double log_product = 0.0;
  double partial = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double amp = amps(n);
    const double a = amp * amp * sobolev_weight(n, sigma);
    partial += a;
    double factor;
    if (law.family() == RadialLaw::Family::gaussian) {
      const double al = a * law.scale() * law.scale();
      factor = 1.0 / (1.0 + al);
      log_product -= std::log1p(al);
    } else {
      factor = radial_laplace_quadrature(law, a);
      log_product += std::log(factor);
    }
    out.factors.push_back(factor);
    out.log_products.push_back(log_product);
    out.partial_sums.push_back(partial);
  }
  return out;
}

double tail_mass_product(const AmplitudeSequence& amps, SobolevIndex sigma, std::size_t N,
                         const RadialLaw& law) {
  if (N == 0) return 1.0;
  return std::exp(tail_mass_profile(amps, sigma, N, law).log_products.back());
}

SigmaClassification classify_sigma(const AmplitudeSequence& amps, SobolevIndex sigma, std::size_t N_max) {
  if (N_max == 0) throw InvalidArgument("classify_sigma: N_max must be >= 1");
  SigmaClassification out;
  out.verdict = amps.classify(2.0, 2.0 * sigma.value);
  double partial = 0.0;
  std::size_t next = 1;
  for (std::size_t n = 1; n <= N_max; ++n) {
    const double amp = amps(n);
    partial += amp * amp * sobolev_weight(n, sigma);
    if (n == next || n == N_max) {
      out.partial_sums.emplace_back(n, partial);
      if (n == next) next *= 2;
    }
  }
  return out;
}

BallEstimate ball_probability(const AmplitudeSequence& amps, const RadialLaw& law,
                              const BirkhoffState& center, double eps, SobolevIndex s, std::size_t N,
                              std::size_t samples, std::uint64_t seed, std::size_t workers) {
  if (!(eps > 0.0)) throw InvalidArgument("ball_probability: eps must be > 0");
  if (samples == 0) throw InvalidArgument("ball_probability: need at least one sample");
  BallEstimate out;
  out.samples = samples;
  out.increase_truncation = N < center.length() && tail_norm(center, N, s) >= eps;

  std::vector<unsigned char> hit(samples, 0);
  parallel_for(samples, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const BirkhoffState z = sample_state(amps, law, N, sample_stream(seed, i));
      hit[i] = h_distance(z, center, s) < eps ? 1 : 0;
    }
  });
  for (const auto h : hit) out.hits += h;
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.interval = wilson_interval(out.hits, samples);
  return out;
}

}  // namespace bolab
