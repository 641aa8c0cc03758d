#include "bolab/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bolab/error.hpp"
#include "bolab/flow.hpp"
#include "bolab/measures.hpp"
#include "bolab/parallel.hpp"

namespace bolab {

std::string_view to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::truncated: return "truncated";
    case FlowKind::renormalized: return "renormalized";
    case FlowKind::broken: return "broken";
  }
  return "truncated";
}

BirkhoffState apply_flow(FlowKind kind, const BirkhoffState& state, std::size_t N, double t,
                         const RenormContext* ctx) {
  switch (kind) {
    case FlowKind::truncated: return flow_truncated(state, FlowSpec{N, t});
    case FlowKind::renormalized:
      if (ctx == nullptr) throw InvalidArgument("apply_flow: renormalized flow needs a RenormContext");
      return renorm_flow(state, *ctx, N, t);
    case FlowKind::broken: {
      BirkhoffState evolved = flow_truncated(state, FlowSpec{N, t});
      std::vector<complex> out(evolved.length());
      for (std::size_t n = 1; n <= evolved.length(); ++n) {
        const complex w = evolved.mode(n);
        const double angle = std::remainder(1.1 * std::arg(w), 2.0 * std::numbers::pi);
        out[n - 1] = std::polar(std::abs(w), angle);
      }
      return BirkhoffState(std::move(out));
    }
  }
  throw InvalidArgument("apply_flow: unknown flow kind");
}

namespace {

InvarianceReport paired_report(const TestFunctional& f, double t, std::span<const double> before,
                               std::span<const double> after, std::uint64_t seed) {
  std::vector<double> diff(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) diff[i] = after[i] - before[i];
  const MeanEstimate d = estimate_mean(diff);
  InvarianceReport r;
  r.functional = f.id;
  r.t = t;
  r.mean_before = mean(before);
  r.mean_after = mean(after);
  r.std_error = d.std_error;
  r.z_score = z_score(d.mean, d.std_error, f.bound);
  r.pass = std::abs(r.z_score) <= kZThreshold;
  r.sample_count = before.size();
  r.seed = seed;
  return r;
}

}  // namespace

std::vector<std::vector<InvarianceReport>> invariance_test(const InvarianceSetup& setup,
                                                           std::span<const double> times) {
  const EnsembleSpec& ens = setup.ensemble;
  if (setup.samples < 1000) throw InvalidArgument("invariance_test: needs at least 1000 samples");
  if (ens.N == 0) throw InvalidArgument("invariance_test: N must be >= 1");
  if (setup.flow_truncation != 0 && setup.flow_truncation != ens.N) {
    throw InvalidArgument("invariance_test: dimension mismatch (sampler N = " + std::to_string(ens.N) +
                          ", flow N = " + std::to_string(setup.flow_truncation) + ")");
  }
  if (setup.functionals.empty()) throw InvalidArgument("invariance_test: no functionals");

  std::optional<RenormContext> ctx;
  if (setup.flow == FlowKind::renormalized) {
    ctx.emplace(ens.amps, ens.law);
    ctx->renorm_constant(ens.N);
  }

  const std::size_t M = setup.samples;
  const std::size_t F = setup.functionals.size();
  const std::size_t T = times.size();
  const std::vector<double> amp_values = ens.amps.values(ens.N);
  // before[f][i], after[t][f][i]
  std::vector<std::vector<double>> before(F, std::vector<double>(M));
  std::vector<std::vector<std::vector<double>>> after(T, before);

  parallel_for(M, setup.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const BirkhoffState z = sample_state(amp_values, ens.law, sample_stream(setup.seed, i));
      for (std::size_t f = 0; f < F; ++f) before[f][i] = setup.functionals[f](z);
      for (std::size_t k = 0; k < T; ++k) {
        const BirkhoffState w = apply_flow(setup.flow, z, ens.N, times[k], ctx ? &*ctx : nullptr);
        for (std::size_t f = 0; f < F; ++f) after[k][f][i] = setup.functionals[f](w);
      }
    }
  });

  std::vector<std::vector<InvarianceReport>> out(T);
  for (std::size_t k = 0; k < T; ++k) {
    for (std::size_t f = 0; f < F; ++f) {
      out[k].push_back(paired_report(setup.functionals[f], times[k], before[f], after[k][f], setup.seed));
    }
  }
  return out;
}

std::vector<InvarianceReport> invariance_test(const InvarianceSetup& setup, double t) {
  const double times[] = {t};
  return invariance_test(setup, times).front();
}

std::vector<BirkhoffState> draw_ensemble(const EnsembleSpec& spec, std::size_t count, std::uint64_t seed,
                                         std::size_t workers) {
  const std::vector<double> amp_values = spec.amps.values(spec.N);
  std::vector<BirkhoffState> out(count, BirkhoffState::zeros(1));
  parallel_for(count, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = sample_state(amp_values, spec.law, sample_stream(seed, i));
    }
  });
  return out;
}

namespace {

std::vector<std::vector<double>> real_coordinates(std::span<const BirkhoffState> ens, std::size_t dims) {
  std::vector<std::vector<double>> out;
  out.reserve(ens.size());
  for (const auto& z : ens) {
    std::vector<double> v(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const complex c = z.mode(d / 2 + 1);
      v[d] = (d % 2 == 0) ? c.real() : c.imag();
    }
    out.push_back(std::move(v));
  }
  return out;
}

double euclid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) s += (x[d] - y[d]) * (x[d] - y[d]);
  return std::sqrt(s);
}

}  // namespace

TwoSampleResult two_sample_test(std::span<const BirkhoffState> a, std::span<const BirkhoffState> b,
                                TwoSampleStatistic statistic, std::uint64_t seed,
                                std::size_t permutations, std::size_t workers) {
  if (a.empty() || b.empty()) throw InvalidArgument("two_sample_test: empty ensemble");
  const std::size_t len = a.front().length();
  const auto same_len = [len](const BirkhoffState& z) { return z.length() == len; };
  if (!std::all_of(a.begin(), a.end(), same_len) || !std::all_of(b.begin(), b.end(), same_len)) {
    throw InvalidArgument("two_sample_test: ensembles must share the same truncation");
  }

  if (statistic == TwoSampleStatistic::per_marginal_ks) {
    const std::size_t dims = 2 * len;
    const auto xa = real_coordinates(a, dims);
    const auto xb = real_coordinates(b, dims);
    TwoSampleResult out{0.0, 1.0};
    double min_p = 1.0;
    std::vector<double> ca(a.size()), cb(b.size());
    for (std::size_t d = 0; d < dims; ++d) {
      for (std::size_t i = 0; i < a.size(); ++i) ca[i] = xa[i][d];
      for (std::size_t i = 0; i < b.size(); ++i) cb[i] = xb[i][d];
      const TestResult r = ks_two_sample(ca, cb);
      out.distance = std::max(out.distance, r.statistic);
      min_p = std::min(min_p, r.p_value);
    }
    out.p_value = std::min(1.0, min_p * static_cast<double>(dims));
    return out;
  }

  const std::size_t dims = std::min<std::size_t>(8, 2 * len);
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t total = na + nb;
  auto pooled = real_coordinates(a, dims);
  for (auto& v : real_coordinates(b, dims)) pooled.push_back(std::move(v));

  std::vector<double> dist(total * total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = i + 1; j < total; ++j) {
      dist[i * total + j] = dist[j * total + i] = euclid(pooled[i], pooled[j]);
    }
  }

  // V-statistic 2 E|X-Y| - E|X-X'| - E|Y-Y'| for the split given by `index`.
  auto energy = [&](const std::vector<std::size_t>& index) {
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      const double* row = &dist[index[i] * total];
      for (std::size_t j = 0; j < na; ++j) sxx += row[index[j]];
      for (std::size_t j = na; j < total; ++j) sxy += row[index[j]];
    }
    for (std::size_t i = na; i < total; ++i) {
      const double* row = &dist[index[i] * total];
      for (std::size_t j = na; j < total; ++j) syy += row[index[j]];
    }
    const double fa = static_cast<double>(na);
    const double fb = static_cast<double>(nb);
    return 2.0 * sxy / (fa * fb) - sxx / (fa * fa) - syy / (fb * fb);
  };

  std::vector<std::size_t> identity(total);
  for (std::size_t i = 0; i < total; ++i) identity[i] = i;
  TwoSampleResult out;
  out.distance = energy(identity);

  std::vector<unsigned char> exceeds(permutations, 0);
  parallel_for(permutations, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> index(total);
    for (std::size_t p = begin; p < end; ++p) {
      index = identity;
      RandomStream rng(seed, p);
      for (std::size_t i = total - 1; i > 0; --i) std::swap(index[i], index[rng.next_below(i + 1)]);
      exceeds[p] = energy(index) >= out.distance ? 1 : 0;
    }
  });
  std::size_t count = 0;
  for (const auto e : exceeds) count += e;
  out.p_value = static_cast<double>(1 + count) / static_cast<double>(1 + permutations);
  return out;
}

bool WeakConvergenceReport::stabilized() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].N < arity) continue;
    if (!points[i].within_3sigma) return false;
    if (i > 0 && points[i - 1].N >= arity && !points[i].exact_repeat) return false;
  }
  return true;
}

WeakConvergenceReport weak_convergence_test(const AmplitudeSequence& amps, const RadialLaw& law,
                                            const TestFunctional& functional,
                                            std::span<const std::size_t> grid, std::size_t N_ref,
                                            std::size_t samples, std::uint64_t seed, std::size_t workers) {
  if (grid.empty()) throw InvalidArgument("weak_convergence_test: empty grid");
  if (samples < 2) throw InvalidArgument("weak_convergence_test: need >= 2 samples");
  const std::size_t grid_max = *std::max_element(grid.begin(), grid.end());
  if (N_ref < grid_max) throw InvalidArgument("weak_convergence_test: N_ref must exceed the grid");

  auto estimate_at = [&](std::size_t N, std::uint64_t stream_seed) {
    const std::vector<double> amp_values = amps.values(N);
    std::vector<double> values(samples);
    parallel_for(samples, workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        values[i] = functional(sample_state(amp_values, law, sample_stream(stream_seed, i)));
      }
    });
    return estimate_mean(values);
  };

  WeakConvergenceReport out;
  out.functional = functional.id;
  out.arity = functional.arity;
  out.reference_N = N_ref;
  out.reference = estimate_at(N_ref, derive_seed(seed, 2));
  const std::uint64_t grid_seed = derive_seed(seed, 1);
  for (const std::size_t N : grid) {
    WeakConvergencePoint p;
    p.N = N;
    p.estimate = estimate_at(N, grid_seed);
    const double se = std::hypot(p.estimate.std_error, out.reference.std_error);
    const double diff = p.estimate.mean - out.reference.mean;
    p.z_vs_reference = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    p.within_3sigma = std::abs(p.z_vs_reference) <= kZThreshold;
    if (!out.points.empty()) {
      const MeanEstimate& prev = out.points.back().estimate;
      p.exact_repeat = prev.mean == p.estimate.mean && prev.std_error == p.estimate.std_error;
    }
    out.points.push_back(p);
  }
  return out;
}

}  // namespace bolab
