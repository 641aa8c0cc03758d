#include <cmath>
#include <random>

#include "bolab/error.hpp"
#include "bolab/flow.hpp"
#include "bolab/measures.hpp"
#include "bolab/renorm.hpp"
#include "bolab/stats.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bolab::AmplitudeSequence;
using bolab::BirkhoffState;
using bolab::RadialLaw;
using bolab::RenormContext;

namespace {

RenormContext harmonic_ctx() { return RenormContext(AmplitudeSequence::power(0.5), RadialLaw::gaussian()); }

// |zeta_k| = k^{-1/2} with arbitrary phases.
BirkhoffState on_shell(std::size_t M, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
  oracle::Coeffs c(M);
  for (std::size_t k = 1; k <= M; ++k) c[k - 1] = std::polar(1.0 / std::sqrt(static_cast<double>(k)), u(gen));
  return BirkhoffState(c);
}

}  // namespace

TEST_SUITE("renorm") {
  TEST_CASE("context validation") {
    CHECK_NOTHROW(harmonic_ctx());
    CHECK_THROWS_AS(RenormContext(AmplitudeSequence::power(1.0), RadialLaw::gaussian()), bolab::InvalidArgument);
    CHECK_THROWS_AS(RenormContext(AmplitudeSequence::power(0.2), RadialLaw::gaussian()), bolab::InvalidArgument);
    CHECK_THROWS_AS(RenormContext(AmplitudeSequence::explicit_list({1.0, 1.0}), RadialLaw::gaussian()),
                    bolab::InvalidArgument);
    CHECK_THROWS_AS(RenormContext(AmplitudeSequence::power(0.5), RadialLaw::radial_exponential()),
                    bolab::InvalidArgument);
    CHECK_NOTHROW(RenormContext(AmplitudeSequence::power(0.5), RadialLaw::radial_exponential().normalized()));
    CHECK_NOTHROW(RenormContext(AmplitudeSequence::power_log(0.5, 0.0), RadialLaw::gaussian()));
  }

  TEST_CASE("action variance from the law moments") {
    CHECK(harmonic_ctx().action_variance() == doctest::Approx(1.0));
    const RenormContext e(AmplitudeSequence::power(0.5), RadialLaw::radial_exponential(2.0).normalized());
    CHECK(e.action_variance() == doctest::Approx(120.0 / 36.0 - 1.0));
  }

  TEST_CASE("renormalization constant") {
    const auto ctx = harmonic_ctx();
    CHECK(bolab::renorm_constant(ctx, 1) == doctest::Approx(1.0));
    CHECK(bolab::renorm_constant(ctx, 2) == doctest::Approx(1.5));
    const double N = 1e4;
    CHECK(std::abs(bolab::renorm_constant(ctx, 10000) - std::log(N) - 0.5772156649) <= 1.0 / (2.0 * N) + 1e-3);
    for (const std::size_t n : {1000u, 4096u, 9999u}) {
      CHECK(bolab::renorm_constant(ctx, n) == doctest::Approx(oracle::harmonic_asymptotic(static_cast<double>(n))).epsilon(1e-12));
    }
    long double backward = 0.0L;
    for (std::size_t k = 17; k >= 1; --k) backward += 1.0L / static_cast<long double>(k);
    CHECK(bolab::renorm_constant(ctx, 17) == doctest::Approx(static_cast<double>(backward)).epsilon(1e-15));
  }

  TEST_CASE("centered sum and limit phase worked examples") {
    std::mt19937_64 gen(1);
    const auto ctx = harmonic_ctx();
    const BirkhoffState z = on_shell(64, gen);
    for (std::size_t N = 1; N <= 64; N *= 2) CHECK(std::abs(bolab::centered_sum(z, ctx, N)) < 1e-12);
    CHECK(bolab::limit_phase(z, ctx, 1, 64) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bolab::limit_phase(z, ctx, 2, 64) == doctest::Approx(6.0).epsilon(1e-12));
    const BirkhoffState zero = BirkhoffState::zeros(32);
    for (const std::size_t n : {1u, 3u, 10u}) {
      const double cN = bolab::renorm_constant(ctx, 32);
      CHECK(bolab::limit_phase(zero, ctx, n, 32) == doctest::Approx(static_cast<double>(n * n) + 2.0 * n * cN));
    }
    CHECK_THROWS_AS(bolab::limit_phase(z, ctx, 5, 4), bolab::InvalidArgument);
    CHECK_THROWS_AS(bolab::centered_sum(z, ctx, 65), bolab::InvalidArgument);
  }

  TEST_CASE("trajectory of an on-shell state is constant in N") {
    std::mt19937_64 gen(2);
    const auto ctx = harmonic_ctx();
    const BirkhoffState z = on_shell(4096, gen);
    for (const std::size_t n : {1u, 5u}) {
      const double first = bolab::limit_phase(z, ctx, n, 32);
      for (std::size_t N = 64; N <= 4096; N *= 2) CHECK(bolab::limit_phase(z, ctx, n, N) == doctest::Approx(first).epsilon(1e-12));
    }
  }

  TEST_CASE("limit phase equals beta plus 2 n c_N") {
    std::mt19937_64 gen(3);
    const auto ctx = harmonic_ctx();
    for (int rep = 0; rep < 10; ++rep) {
      const BirkhoffState z = bolab::sample_state(ctx.amps(), ctx.law(), 4096, bolab::sample_stream(10, rep));
      for (std::size_t N = 1; N <= 4096; N *= 4) {
        const auto beta = bolab::phase_vector(z, N);
        const auto all = bolab::limit_phases(z, ctx, N);
        const double cN = bolab::renorm_constant(ctx, N);
        for (std::size_t n = 1; n <= N; n = n * 3 + 1) {
          const double expect = beta[n] + 2.0 * static_cast<double>(n) * cN;
          const double got = bolab::limit_phase(z, ctx, n, N);
          CHECK(std::abs(got - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
          CHECK(std::abs(all[n - 1] - got) <= 1e-10 * std::max(1.0, std::abs(expect)));
        }
      }
    }
  }

  TEST_CASE("renormalized flow") {
    std::mt19937_64 gen(4);
    const auto ctx = harmonic_ctx();
    const BirkhoffState z = bolab::sample_state(ctx.amps(), ctx.law(), 128, bolab::sample_stream(11, 0));
    CHECK(bolab::renorm_flow(z, ctx, 64, 0.0) == bolab::project(z, 64));
    const double t = 0.83;
    const BirkhoffState a = bolab::renorm_flow(z, ctx, 64, t);
    const BirkhoffState plain = bolab::flow_truncated(z, {64, t});
    const double cN = bolab::renorm_constant(ctx, 64);
    for (std::size_t n = 1; n <= 64; ++n) {
      const auto expect = z.mode(n) * std::polar(1.0, t * bolab::limit_phase(z, ctx, n, 64));
      CHECK(std::abs(a.mode(n) - expect) <= 1e-10);
      CHECK(std::abs(a.mode(n) - plain.mode(n) * std::polar(1.0, 2.0 * t * n * cN)) <= 1e-10);
      CHECK(std::abs(a.mode(n)) == doctest::Approx(std::abs(z.mode(n))).epsilon(1e-14));
    }
    const BirkhoffState ab = bolab::renorm_flow(a, ctx, 64, -0.3);
    const BirkhoffState direct = bolab::renorm_flow(z, ctx, 64, t - 0.3);
    for (std::size_t n = 1; n <= 64; ++n) CHECK(std::abs(ab.mode(n) - direct.mode(n)) <= 1e-10);
  }

  TEST_CASE("centered sum has mean zero and the predicted variance") {
    const auto ctx = harmonic_ctx();
    const std::size_t M = 20000;
    std::vector<double> s64(M), inc(M);
    for (std::size_t i = 0; i < M; ++i) {
      const BirkhoffState z = bolab::sample_state(ctx.amps(), ctx.law(), 256, bolab::sample_stream(12, i));
      s64[i] = bolab::centered_sum(z, ctx, 64);
      inc[i] = bolab::centered_sum(z, ctx, 256) - s64[i];
    }
    const auto e = bolab::estimate_mean(s64);
    CHECK(std::abs(e.mean) <= 3.0 * e.std_error);
    double predicted = 0.0;
    for (std::size_t k = 65; k <= 256; ++k) predicted += 1.0 / static_cast<double>(k * k);
    CHECK(bolab::sample_variance(inc) / predicted == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("phase diagnostic") {
    const auto ctx = harmonic_ctx();
    const std::vector<std::size_t> grid = {32, 64, 128, 256, 512, 1024, 2048, 4096};
    bolab::PhaseDiagnosticOptions opts;
    opts.keep_trajectories = true;
    const auto d = bolab::phase_convergence_diagnostic(ctx, 1, grid, 10000, 5, opts);
    REQUIRE(d.increments.size() == grid.size() - 1);
    CHECK(d.trajectories.size() == 10000 * grid.size());
    CHECK(d.phases_within(0.15));
    for (const auto& g : d.increments) {
      double tail4 = 0.0;
      for (std::size_t k = g.from + 1; k <= g.to; ++k) tail4 += 1.0 / static_cast<double>(k * k);
      CHECK(g.predicted_phase_msq == doctest::Approx(4.0 * tail4).epsilon(1e-12));
      CHECK(g.predicted_centered_var == doctest::Approx(tail4).epsilon(1e-12));
    }
    const auto row = [&](std::size_t i, std::size_t j) { return d.trajectories[i * grid.size() + j]; };
    const BirkhoffState z0 = bolab::sample_state(ctx.amps(), ctx.law(), 4096, bolab::sample_stream(5, 0));
    CHECK(row(0, 3) == doctest::Approx(bolab::limit_phase(z0, ctx, 1, 256)).epsilon(1e-12));

    const auto d2 = bolab::phase_convergence_diagnostic(ctx, 1, grid, 20000, 6);
    for (std::size_t j = 0; j < d.increments.size(); ++j) {
      const double ratio = d.increments[j].phase_msq_std_error / d2.increments[j].phase_msq_std_error;
      CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.2));
    }
  }

  TEST_CASE("phase diagnostic does not depend on the worker count") {
    const auto ctx = harmonic_ctx();
    const std::vector<std::size_t> grid = {8, 16, 32};
    bolab::PhaseDiagnosticOptions one;
    bolab::PhaseDiagnosticOptions many;
    many.workers = 3;
    const auto a = bolab::phase_convergence_diagnostic(ctx, 2, grid, 999, 7, one);
    const auto b = bolab::phase_convergence_diagnostic(ctx, 2, grid, 999, 7, many);
    for (std::size_t j = 0; j < a.increments.size(); ++j) {
      CHECK(a.increments[j].empirical_phase_msq == b.increments[j].empirical_phase_msq);
      CHECK(a.increments[j].empirical_centered_var == b.increments[j].empirical_centered_var);
    }
  }
}
