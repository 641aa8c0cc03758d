#include "bolab/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bolab/error.hpp"
#include "bolab/flow.hpp"
#include "bolab/measures.hpp"
#include "bolab/parallel.hpp"
#include "bolab/stats.hpp"

namespace bolab {

RenormContext::RenormContext(AmplitudeSequence amps, RadialLaw law)
    : amps_(std::move(amps)), law_(law), cache_(std::make_shared<PrefixCache>()) {
  if (amps_.rule() == AmplitudeSequence::Rule::explicit_list) {
    throw InvalidArgument("RenormContext: series conditions cannot be certified for an explicit list");
  }
  if (amps_.classify(2.0, 0.0) != SeriesVerdict::diverges) {
    throw InvalidArgument("RenormContext: sum |alpha_n|^2 converges for " + amps_.describe() +
                          "; the renormalized regime needs it to diverge");
  }
  if (amps_.classify(4.0, 0.0) != SeriesVerdict::converges) {
    throw InvalidArgument("RenormContext: sum |alpha_n|^4 diverges for " + amps_.describe());
  }
  if (std::abs(law_.second_moment() - 1.0) > 1e-12) {
    throw InvalidArgument("RenormContext: law must satisfy E|g|^2 = 1 (got " +
                          format_double(law_.second_moment()) + ")");
  }
}

double RenormContext::action_variance() const {
  const double m2 = law_.second_moment();
  return law_.abs_fourth_moment() - m2 * m2;
}

double RenormContext::renorm_constant(std::size_t N) const {
  std::lock_guard lock(cache_->mutex);
  auto& prefix = cache_->prefix;
  while (prefix.size() <= N) {
    const double a = amps_(prefix.size());
    prefix.push_back(prefix.back() + a * a);
  }
  return prefix[N];
}

double renorm_constant(const RenormContext& ctx, std::size_t N) {
  if (N == 0) throw InvalidArgument("renorm_constant: N must be >= 1");
  return ctx.renorm_constant(N);
}

double centered_sum(const BirkhoffState& state, const RenormContext& ctx, std::size_t N) {
  if (N > state.length()) throw InvalidArgument("centered_sum: N exceeds the state length");
  double actions = 0.0;
  for (std::size_t k = 1; k <= N; ++k) actions += state.action(k);
  return actions - ctx.renorm_constant(N);
}

std::vector<double> limit_phases(const BirkhoffState& state, const RenormContext& ctx, std::size_t N) {
  if (N == 0 || N > state.length()) {
    throw InvalidArgument("limit_phase: need 1 <= N <= length (N = " + std::to_string(N) + ")");
  }
  const double s_n = centered_sum(state, ctx, N);
  std::vector<double> out(N);
  double prefix = 0.0;
  double weighted = 0.0;  // sum_{k<=n} (n-k)|zeta_k|^2
  for (std::size_t n = 1; n <= N; ++n) {
    weighted += prefix;
    prefix += state.action(n);
    const double nn = static_cast<double>(n);
    out[n - 1] = nn * nn + 2.0 * weighted - 2.0 * nn * s_n;
  }
  return out;
}

double limit_phase(const BirkhoffState& state, const RenormContext& ctx, std::size_t n, std::size_t N) {
  if (n == 0 || n > N) throw InvalidArgument("limit_phase: need 1 <= n <= N");
  return limit_phases(state, ctx, N)[n - 1];
}

BirkhoffState renorm_flow(const BirkhoffState& state, const RenormContext& ctx, std::size_t N, double t) {
  const std::vector<double> phases = limit_phases(state, ctx, N);
  std::vector<complex> out(N);
  for (std::size_t n = 1; n <= N; ++n) out[n - 1] = state.mode(n) * unit_phase(t * phases[n - 1]);
  return BirkhoffState(std::move(out));
}

bool PhaseDiagnostic::phases_within(double tolerance) const {
  return std::all_of(increments.begin(), increments.end(),
                     [&](const GridIncrement& g) { return std::abs(g.phase_ratio - 1.0) <= tolerance; });
}

bool PhaseDiagnostic::centered_within(double tolerance) const {
  return std::all_of(increments.begin(), increments.end(),
                     [&](const GridIncrement& g) { return std::abs(g.centered_ratio - 1.0) <= tolerance; });
}

PhaseDiagnostic phase_convergence_diagnostic(const RenormContext& ctx, std::size_t n,
                                             std::span<const std::size_t> grid, std::size_t samples,
                                             std::uint64_t seed, const PhaseDiagnosticOptions& options) {
  if (grid.size() < 2) throw InvalidArgument("phase_convergence_diagnostic: grid needs >= 2 points");
  if (samples < 2) throw InvalidArgument("phase_convergence_diagnostic: need >= 2 samples");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < n || (i > 0 && grid[i] <= grid[i - 1])) {
      throw InvalidArgument("phase_convergence_diagnostic: grid must be increasing with entries >= n");
    }
  }
  const std::size_t points = grid.size();
  const std::size_t n_max = grid.back();
  ctx.renorm_constant(n_max);

  PhaseDiagnostic out;
  out.mode = n;
  out.grid.assign(grid.begin(), grid.end());
  out.samples = samples;
  out.seed = seed;
  out.flow_time = options.flow_time;

  std::vector<double> centered(samples * points);
  std::vector<double> phases(samples * points);
  std::vector<double> hdist(options.track_hminus1 ? samples * (points - 1) : 0);
  const std::vector<double> amp_values = ctx.amps().values(n_max);

  parallel_for(samples, options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const BirkhoffState z = sample_state(amp_values, ctx.law(), sample_stream(seed, i));
      for (std::size_t g = 0; g < points; ++g) {
        const std::vector<double> phi = limit_phases(z, ctx, grid[g]);
        centered[i * points + g] = centered_sum(z, ctx, grid[g]);
        phases[i * points + g] = phi[n - 1];
      }
      if (options.track_hminus1) {
        BirkhoffState previous = renorm_flow(z, ctx, grid[0], options.flow_time);
        for (std::size_t g = 0; g + 1 < points; ++g) {
          BirkhoffState next = renorm_flow(z, ctx, grid[g + 1], options.flow_time);
          hdist[i * (points - 1) + g] = h_distance(next, previous, SobolevIndex{-1.0});
          previous = std::move(next);
        }
      }
    }
  });

  const double C = ctx.action_variance();
  const double nn = static_cast<double>(n);
  std::vector<double> dc(samples), dp(samples), dh(samples);
  for (std::size_t g = 0; g + 1 < points; ++g) {
    for (std::size_t i = 0; i < samples; ++i) {
      dc[i] = centered[i * points + g + 1] - centered[i * points + g];
      const double d = phases[i * points + g + 1] - phases[i * points + g];
      dp[i] = d * d;
      if (options.track_hminus1) dh[i] = hdist[i * (points - 1) + g];
    }
    double fourth = 0.0;
    for (std::size_t k = grid[g] + 1; k <= grid[g + 1]; ++k) {
      const double a = ctx.amps()(k);
      fourth += a * a * a * a;
    }
    GridIncrement inc;
    inc.from = grid[g];
    inc.to = grid[g + 1];
    inc.empirical_centered_var = sample_variance(dc);
    inc.predicted_centered_var = C * fourth;
    inc.centered_ratio = inc.empirical_centered_var / inc.predicted_centered_var;
    const MeanEstimate msq = estimate_mean(dp);
    inc.empirical_phase_msq = msq.mean;
    inc.phase_msq_std_error = msq.std_error;
    inc.predicted_phase_msq = 4.0 * nn * nn * C * fourth;
    inc.phase_ratio = inc.empirical_phase_msq / inc.predicted_phase_msq;
    if (options.track_hminus1) inc.mean_hminus1_distance = mean(dh);
    out.increments.push_back(inc);
  }
  if (options.keep_trajectories) out.trajectories = std::move(phases);
  return out;
}

}  // namespace bolab
