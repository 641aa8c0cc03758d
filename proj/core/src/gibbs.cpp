#include "bolab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bolab/amplitudes.hpp"
#include "bolab/error.hpp"
#include "bolab/flow.hpp"
#include "bolab/invariance.hpp"
#include "bolab/measures.hpp"
#include "bolab/parallel.hpp"
#include "bolab/stats.hpp"

namespace bolab {

double CutoffProfile::operator()(double x) const {
  const double ax = std::abs(x);
  if (kind == Kind::triangular) return ax < a ? 1.0 - ax / a : 0.0;
  if (ax <= a) return 1.0;
  if (ax < a + ramp) return 1.0 - (ax - a) / ramp;
  return 0.0;
}

void GibbsSpec::validate() const {
  if (N == 0) throw InvalidArgument("GibbsSpec: N must be >= 1");
  if (!(cutoff.a > 0.0) || !std::isfinite(cutoff.a)) throw InvalidArgument("GibbsSpec: cutoff a must be > 0");
  if (cutoff.kind == CutoffProfile::Kind::plateau && !(cutoff.ramp > 0.0)) {
    throw InvalidArgument("GibbsSpec: plateau ramp must be > 0");
  }
  if (!explicit_constants.empty()) {
    if (explicit_constants.size() < N) {
      throw InvalidArgument("GibbsSpec: explicit c_N list shorter than N");
    }
    if (!std::isfinite(explicit_constants[N - 1])) throw InvalidArgument("GibbsSpec: c_N must be finite");
  }
}

double GibbsSpec::renorm_constant() const {
  if (!explicit_constants.empty()) return explicit_constants.at(N - 1);
  double h = 0.0;
  for (std::size_t k = N; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

std::optional<GibbsWeight> gibbs_log_density(const BirkhoffState& state, const GibbsSpec& spec) {
  spec.validate();
  if (state.length() < spec.N) throw InvalidArgument("gibbs_log_density: state shorter than N");
  double energy = 0.0;
  double tail = 0.0;
  double log_weight = 0.0;
  for (std::size_t k = spec.N; k >= 1; --k) {
    const double a = state.action(k);
    energy += static_cast<double>(k) * a;
    tail += a;
    log_weight += tail * tail;
  }
  const double chi = spec.cutoff(energy - spec.renorm_constant());
  if (chi <= 0.0) return std::nullopt;
  return GibbsWeight{log_weight, chi};
}

namespace {

struct WeightedEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Self-normalized mean of x under normalized weights w (sum w = 1).
WeightedEstimate weighted(std::span<const double> w, std::span<const double> x) {
  std::vector<double> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * x[i];
  WeightedEstimate e;
  e.mean = pairwise_sum(terms);
  for (std::size_t i = 0; i < w.size(); ++i) terms[i] = w[i] * w[i] * (x[i] - e.mean) * (x[i] - e.mean);
  e.std_error = std::sqrt(pairwise_sum(terms));
  return e;
}

}  // namespace

GibbsReport gibbs_weighted_statistics(const GibbsSpec& spec, std::span<const TestFunctional> functionals,
                                      std::size_t samples, std::uint64_t seed, double t,
                                      std::size_t workers) {
  spec.validate();
  if (samples < 10000) throw InvalidArgument("gibbs_weighted_statistics: needs at least 10^4 samples");
  const std::size_t F = functionals.size();
  const std::vector<double> amp_values = AmplitudeSequence::power(1.0).values(spec.N);
  const RadialLaw law = RadialLaw::gaussian();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<double> log_w(samples, neg_inf);
  std::vector<double> drift(samples, 0.0);
  std::vector<std::vector<double>> before(F, std::vector<double>(samples));
  std::vector<std::vector<double>> after(F, std::vector<double>(samples));

  parallel_for(samples, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const BirkhoffState z = sample_state(amp_values, law, sample_stream(seed, i));
      const BirkhoffState w = flow_truncated(z, FlowSpec{spec.N, t});
      const auto g = gibbs_log_density(z, spec);
      if (g) {
        log_w[i] = g->log_weight + std::log(g->cutoff_value);
        const auto g_after = gibbs_log_density(w, spec);
        const double lw_after = g_after ? g_after->log_weight + std::log(g_after->cutoff_value) : neg_inf;
        drift[i] = std::abs(lw_after - log_w[i]);
      }
      for (std::size_t f = 0; f < F; ++f) {
        before[f][i] = functionals[f](z);
        after[f][i] = functionals[f](w);
      }
    }
  });

  GibbsReport out;
  out.samples = samples;
  out.renorm_constant = spec.renorm_constant();
  out.t = t;
  out.seed = seed;
  for (std::size_t i = 0; i < samples; ++i) {
    if (log_w[i] != neg_inf) {
      ++out.retained;
      out.max_log_weight_drift = std::max(out.max_log_weight_drift, drift[i]);
    }
  }
  if (out.retained == 0) {
    throw DegenerateWeightsError("gibbs: the cutoff excludes every sample", 0.0);
  }

  const double log_total = log_sum_exp(log_w);
  std::vector<double> w(samples);
  std::vector<double> w2(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    w[i] = std::exp(log_w[i] - log_total);
    w2[i] = w[i] * w[i];
  }
  out.effective_sample_size = 1.0 / pairwise_sum(w2);
  if (out.effective_sample_size < kMinEffectiveSampleSize) {
    throw DegenerateWeightsError("gibbs: effective sample size " + format_double(out.effective_sample_size) +
                                     " below " + format_double(kMinEffectiveSampleSize),
                                 out.effective_sample_size);
  }

  std::vector<double> diff(samples);
  for (std::size_t f = 0; f < F; ++f) {
    GibbsFunctionalReport r;
    r.functional = functionals[f].id;
    const WeightedEstimate b = weighted(w, before[f]);
    const WeightedEstimate a = weighted(w, after[f]);
    for (std::size_t i = 0; i < samples; ++i) diff[i] = after[f][i] - before[f][i];
    const WeightedEstimate d = weighted(w, diff);
    r.weighted_mean_before = b.mean;
    r.std_error_before = b.std_error;
    r.z_zero = z_score(b.mean, b.std_error, functionals[f].bound);
    r.weighted_mean_after = a.mean;
    r.paired_std_error = d.std_error;
    r.z_paired = z_score(d.mean, d.std_error, functionals[f].bound);
    r.pass = std::abs(r.z_paired) <= kZThreshold &&
             (!functionals[f].phase_sensitive || std::abs(r.z_zero) <= kZThreshold);
    out.functionals.push_back(r);
  }
  return out;
}

}  // namespace bolab
