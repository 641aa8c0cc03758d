#include <cmath>
#include <random>

#include "bolab/error.hpp"
#include "bolab/flow.hpp"
#include "bolab/functionals.hpp"
#include "bolab/invariance.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bolab::AmplitudeSequence;
using bolab::BirkhoffState;
using bolab::FlowKind;
using bolab::InvarianceSetup;
using bolab::RadialLaw;

namespace {

InvarianceSetup base_setup(std::size_t N, std::size_t samples, std::uint64_t seed) {
  InvarianceSetup s;
  s.ensemble = {AmplitudeSequence::power(1.0), RadialLaw::gaussian(), N};
  s.samples = samples;
  s.seed = seed;
  return s;
}

const bolab::InvarianceReport& by_id(const std::vector<bolab::InvarianceReport>& r, const std::string& id) {
  for (const auto& x : r) {
    if (x.functional == id) return x;
  }
  throw std::runtime_error("missing " + id);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("functional panel values") {
    const auto panel = bolab::builtin_functionals();
    REQUIRE(panel.size() == 5);
    const BirkhoffState zero = BirkhoffState::zeros(4);
    CHECK(bolab::find_functional(panel, "F1")(zero) == 1.0);
    CHECK(bolab::find_functional(panel, "F2")(zero) == 0.0);
    CHECK(bolab::find_functional(panel, "F3")(zero) == 0.0);
    CHECK(bolab::find_functional(panel, "F4")(zero) == 0.0);
    CHECK(bolab::find_functional(panel, "F5")(zero) == 0.0);
    const BirkhoffState z(oracle::Coeffs{{0.5, 0.5}, {0.0, 2.0}, {3.0, 0.0}, {0.1, 0.0}});
    CHECK(bolab::find_functional(panel, "F1")(z) == doctest::Approx(std::exp(-(0.5 + 4.0 + 9.0 + 0.01))));
    CHECK(bolab::find_functional(panel, "F2")(z) == doctest::Approx(0.5 * std::exp(-0.5)));
    // arg z2 - 2 arg z1 = pi/2 - pi/2 = 0
    CHECK(bolab::find_functional(panel, "F3")(z) == doctest::Approx(1.0));
    CHECK(bolab::find_functional(panel, "F4")(z) == 1.0);
    CHECK(bolab::find_functional(panel, "F5")(z) == doctest::Approx(std::sin(2.5)));
    CHECK_THROWS_AS(bolab::find_functional(panel, "F9"), bolab::InvalidArgument);
    int sensitive = 0;
    for (const auto& f : panel) sensitive += f.phase_sensitive ? 1 : 0;
    CHECK(sensitive == 3);
  }

  TEST_CASE("functionals respect their bounds and are continuous") {
    const auto panel = bolab::builtin_functionals();
    std::mt19937_64 gen(1);
    std::vector<double> sup(panel.size(), 0.0);
    for (int probe = 0; probe < 1000000; ++probe) {
      const double scale = std::exp(std::uniform_real_distribution<double>(-6.0, 3.0)(gen));
      oracle::Coeffs c = oracle::random_coeffs(gen, 4, 0.0);
      for (auto& x : c) x *= scale;
      const BirkhoffState z(c);
      for (std::size_t f = 0; f < panel.size(); ++f) sup[f] = std::max(sup[f], std::abs(panel[f](z)));
    }
    for (std::size_t f = 0; f < panel.size(); ++f) CHECK(sup[f] <= panel[f].bound * (1.0 + 1e-12));
    CHECK(sup[1] > 0.99 * panel[1].bound);

    for (int rep = 0; rep < 100; ++rep) {
      const oracle::Coeffs c = oracle::random_coeffs(gen, 4, 0.0);
      const BirkhoffState z(c);
      for (const auto& f : panel) {
        double previous = 1e300;
        for (const double d : {1e-3, 1e-5, 1e-7}) {
          oracle::Coeffs shifted = c;
          for (auto& x : shifted) x += oracle::cplx(d, -d);
          const double diff = std::abs(f(BirkhoffState(shifted)) - f(z));
          CHECK(diff <= previous + 1e-15);
          previous = diff;
        }
        CHECK(previous < 1e-4);
      }
    }
  }

  TEST_CASE("paired estimator is exact at t = 0") {
    const auto reports = bolab::invariance_test(base_setup(8, 2000, 3), 0.0);
    REQUIRE(reports.size() == 5);
    for (const auto& r : reports) {
      CHECK(r.mean_before == r.mean_after);
      CHECK(r.z_score == 0.0);
      CHECK(r.pass);
      CHECK(r.sample_count == 2000);
      CHECK(r.seed == 3);
    }
  }

  TEST_CASE("invariance test preconditions") {
    CHECK_THROWS_AS(bolab::invariance_test(base_setup(8, 999, 3), 1.0), bolab::InvalidArgument);
    auto mismatch = base_setup(8, 1000, 3);
    mismatch.flow_truncation = 6;
    CHECK_THROWS_AS(bolab::invariance_test(mismatch, 1.0), bolab::InvalidArgument);
    auto renorm = base_setup(8, 1000, 3);
    renorm.flow = FlowKind::renormalized;
    CHECK_THROWS_AS(bolab::invariance_test(renorm, 1.0), bolab::InvalidArgument);
  }

  TEST_CASE("healthy flow passes and the broken flow is detected") {
    const auto good = bolab::invariance_test(base_setup(32, 100000, 11), 1.7);
    for (const auto& r : good) CHECK(r.pass);
    CHECK(by_id(good, "F1").mean_before == doctest::Approx(oracle::gaussian_f1_mean({1.0, 0.5, 1.0 / 3.0, 0.25}, 32)).epsilon(0.01));
    auto broken = base_setup(32, 100000, 11);
    broken.flow = FlowKind::broken;
    const auto bad = bolab::invariance_test(broken, 1.7);
    CHECK(std::abs(by_id(bad, "F2").z_score) > 3.0);
    CHECK_FALSE(by_id(bad, "F2").pass);
  }

  TEST_CASE("broken flow keeps the moduli") {
    std::mt19937_64 gen(2);
    const BirkhoffState z = oracle::random_state(gen, 6);
    const BirkhoffState b = bolab::apply_flow(FlowKind::broken, z, 6, 0.9);
    for (std::size_t n = 1; n <= 6; ++n) CHECK(std::abs(b.mode(n)) == doctest::Approx(std::abs(z.mode(n))));
    CHECK(bolab::apply_flow(FlowKind::truncated, z, 6, 0.9) == bolab::flow_truncated(z, {6, 0.9}));
  }

  TEST_CASE("multi time form reuses the samples") {
    const auto setup = base_setup(4, 3000, 5);
    const std::vector<double> times = {0.3, -2.5};
    const auto multi = bolab::invariance_test(setup, times);
    REQUIRE(multi.size() == 2);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const auto single = bolab::invariance_test(setup, times[k]);
      for (std::size_t f = 0; f < single.size(); ++f) {
        CHECK(single[f].mean_after == multi[k][f].mean_after);
        CHECK(single[f].z_score == multi[k][f].z_score);
      }
    }
  }

  TEST_CASE("results do not depend on the worker count") {
    auto a = base_setup(16, 4000, 8);
    auto b = a;
    b.workers = 3;
    const auto ra = bolab::invariance_test(a, 1.1);
    const auto rb = bolab::invariance_test(b, 1.1);
    for (std::size_t f = 0; f < ra.size(); ++f) {
      CHECK(ra[f].mean_before == rb[f].mean_before);
      CHECK(ra[f].std_error == rb[f].std_error);
      CHECK(ra[f].z_score == rb[f].z_score);
    }
  }

  TEST_CASE("two sample tests") {
    const bolab::EnsembleSpec gauss{AmplitudeSequence::power(1.0), RadialLaw::gaussian(), 4};
    const auto a = bolab::draw_ensemble(gauss, 300, 1);
    const auto same = bolab::two_sample_test(a, a, bolab::TwoSampleStatistic::energy_distance, 1, 200);
    CHECK(std::abs(same.distance) < 1e-12);

    int passes = 0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      const auto fresh = bolab::draw_ensemble(gauss, 300, 100 + rep);
      auto pushed = bolab::draw_ensemble(gauss, 300, 200 + rep);
      for (auto& z : pushed) z = bolab::flow_truncated(z, {4, 1.7});
      const auto r = bolab::two_sample_test(fresh, pushed, bolab::TwoSampleStatistic::energy_distance, rep, 200);
      passes += r.p_value > 0.01 ? 1 : 0;
    }
    CHECK(passes >= 18);

    const bolab::EnsembleSpec expo{AmplitudeSequence::power(1.0), RadialLaw::radial_exponential().normalized(), 4};
    const auto g = bolab::draw_ensemble(gauss, 2000, 7);
    const auto e = bolab::draw_ensemble(expo, 2000, 8);
    CHECK(bolab::two_sample_test(g, e, bolab::TwoSampleStatistic::per_marginal_ks, 0).p_value < 0.01);
    const bolab::EnsembleSpec expo_raw{AmplitudeSequence::power(1.0), RadialLaw::radial_exponential(), 4};
    const auto g_small = bolab::draw_ensemble(gauss, 300, 7);
    const auto e_small = bolab::draw_ensemble(expo_raw, 300, 8);
    CHECK(bolab::two_sample_test(g_small, e_small, bolab::TwoSampleStatistic::energy_distance, 0, 200).p_value < 0.01);
    const auto g2 = bolab::draw_ensemble(gauss, 2000, 9);
    CHECK(bolab::two_sample_test(g, g2, bolab::TwoSampleStatistic::per_marginal_ks, 0).p_value > 0.01);
  }

  TEST_CASE("weak convergence") {
    const auto panel = bolab::builtin_functionals();
    const auto amps = AmplitudeSequence::power(1.0);
    const std::vector<std::size_t> grid = {1, 2, 4, 8};
    const auto local = bolab::weak_convergence_test(amps, RadialLaw::gaussian(), bolab::find_functional(panel, "F2"),
                                                    grid, 64, 20000, 3);
    CHECK(local.stabilized());
    for (std::size_t i = 1; i < local.points.size(); ++i) CHECK(local.points[i].exact_repeat);

    const auto f1 = bolab::weak_convergence_test(amps, RadialLaw::gaussian(), bolab::find_functional(panel, "F1"),
                                                 grid, 64, 100000, 4);
    CHECK(f1.stabilized());
    CHECK_FALSE(f1.points[1].within_3sigma);
    CHECK(f1.points[1].estimate.mean == doctest::Approx(oracle::gaussian_f1_mean({1.0, 0.5}, 2)).epsilon(0.01));
    CHECK(f1.reference.mean == doctest::Approx(oracle::gaussian_f1_mean({1.0, 0.5, 1.0 / 3.0, 0.25}, 4)).epsilon(0.01));
    CHECK(f1.points[3].exact_repeat);

    const auto again = bolab::weak_convergence_test(amps, RadialLaw::gaussian(), bolab::find_functional(panel, "F1"),
                                                    grid, 64, 100000, 5);
    const double se = std::hypot(f1.reference.std_error, again.reference.std_error);
    CHECK(std::abs(f1.reference.mean - again.reference.mean) <= 3.0 * se);
    CHECK_THROWS_AS(bolab::weak_convergence_test(amps, RadialLaw::gaussian(), panel[0], grid, 4, 100, 1),
                    bolab::InvalidArgument);
  }
}
