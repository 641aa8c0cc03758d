#include "bolab/runner.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "bolab/error.hpp"
#include "bolab/flow.hpp"
#include "bolab/functionals.hpp"
#include "bolab/gibbs.hpp"
#include "bolab/invariance.hpp"
#include "bolab/measures.hpp"
#include "bolab/parallel.hpp"
#include "bolab/renorm.hpp"
#include "bolab/state.hpp"
#include "bolab/stats.hpp"
#include "json_writer.hpp"

#ifndef BOLAB_VERSION
#define BOLAB_VERSION "0.0.0"
#endif

namespace bolab {

std::string version() { return BOLAB_VERSION; }

namespace {

using detail::JsonWriter;

enum class Verdict { none, pass, fail };

struct Artifact {
  std::string suffix;  // appended to config.out; empty for the main payload
  std::string body;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  Verdict verdict = Verdict::none;
  std::size_t stream_count = 0;  // per-sample substreams consumed
};

std::string fmt(double x) { return format_double(x); }

bool json(const ExperimentConfig& c) { return c.format == "json"; }

void write_echo(JsonWriter& w, const ExperimentConfig& c) {
  w.begin_object();
  for (const auto& [k, v] : config_echo(c)) w.field(k, v);
  w.end_object();
}

std::vector<TestFunctional> select_functionals(const std::vector<std::string>& ids) {
  const auto panel = builtin_functionals();
  std::vector<TestFunctional> out;
  for (const auto& id : ids) out.push_back(find_functional(panel, id));
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

BirkhoffState load_state(const std::string& path) {
  std::ifstream in = open_input(path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return state_from_json(text);
  }
  return read_state_csv(in);
}

Outcome run_flow(const ExperimentConfig& c) {
  Outcome o;
  BirkhoffState initial = BirkhoffState::zeros(1);
  if (c.state.empty()) {
    initial = sample_state(c.amplitude_sequence(), c.radial_law(), c.n, sample_stream(*c.seed, 0));
    o.stream_count = 1;
  } else {
    initial = load_state(c.state);
  }
  for (const auto N : c.profile) {
    if (N > initial.length()) {
      throw InvalidArgument("profile truncation " + std::to_string(N) + " exceeds the state length " +
                            std::to_string(initial.length()));
    }
  }
  const BirkhoffState evolved = flow_truncated(initial, {c.n, c.t});
  std::vector<double> profile;
  if (!c.profile.empty()) profile = convergence_profile(initial, c.t, SobolevIndex{c.s}, c.profile);

  if (json(c)) {
    JsonWriter w;
    w.begin_object().field("N", std::min(c.n, initial.length())).field("t", c.t);
    w.field("hamiltonian", hamiltonian(evolved, evolved.length()));
    w.key("state").begin_array();
    for (std::size_t n = 1; n <= evolved.length(); ++n) {
      w.begin_array().value(evolved.mode(n).real()).value(evolved.mode(n).imag()).end_array();
    }
    w.end_array();
    w.field("s", c.s).key("profile").begin_array();
    for (std::size_t i = 0; i < profile.size(); ++i) {
      w.begin_object().field("N", c.profile[i]).field("distance", profile[i]).end_object();
    }
    w.end_array().end_object();
    o.artifacts.push_back({"", w.str() + "\n"});
    return o;
  }
  std::ostringstream data;
  write_state_csv(data, evolved);
  o.artifacts.push_back({"", data.str()});
  if (!profile.empty()) {
    std::string body = "N,distance\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
      body += std::to_string(c.profile[i]) + "," + fmt(profile[i]) + "\n";
    }
    o.artifacts.push_back({".profile.csv", body});
  }
  return o;
}

Outcome run_sample(const ExperimentConfig& c) {
  Outcome o;
  const EnsembleSpec spec{c.amplitude_sequence(), c.radial_law(), c.n};
  const auto ensemble = draw_ensemble(spec, c.samples, *c.seed, c.workers);
  o.stream_count = c.samples;
  if (!json(c)) {
    std::string body = "sample,n,re,im\n";
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      for (std::size_t n = 1; n <= ensemble[i].length(); ++n) {
        const complex z = ensemble[i].mode(n);
        body += std::to_string(i) + "," + std::to_string(n) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "\n";
      }
    }
    o.artifacts.push_back({"", body});
    return o;
  }
  const auto amps = spec.amps.values(c.n);
  const double m2 = spec.law.second_moment();
  std::vector<double> values(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double h = h_norm(ensemble[i], SobolevIndex{c.s});
    values[i] = h * h;
  }
  const MeanEstimate hs = estimate_mean(values);
  double predicted_hs = 0.0;
  for (std::size_t n = 1; n <= c.n; ++n) predicted_hs += sobolev_weight(n, SobolevIndex{c.s}) * amps[n - 1] * amps[n - 1];
  predicted_hs *= m2;

  JsonWriter w;
  w.begin_object()
      .field("law", spec.law.name())
      .field("amps", spec.amps.describe())
      .field("N", c.n)
      .field("seed", *c.seed)
      .field("samples", c.samples);
  w.key("moments").begin_object();
  w.field("second_moment", m2).field("abs_fourth_moment", spec.law.abs_fourth_moment());
  w.field("s", c.s).field("mean_h_norm_sq", hs.mean).field("h_norm_sq_std_error", hs.std_error);
  w.field("predicted_h_norm_sq", predicted_hs);
  w.key("modes").begin_array();
  for (std::size_t n = 1; n <= c.n; ++n) {
    for (std::size_t i = 0; i < ensemble.size(); ++i) values[i] = ensemble[i].action(n);
    const MeanEstimate e = estimate_mean(values);
    w.begin_object()
        .field("n", n)
        .field("mean_action", e.mean)
        .field("std_error", e.std_error)
        .field("predicted_action", amps[n - 1] * amps[n - 1] * m2)
        .end_object();
  }
  w.end_array().end_object();
  const TailMassProfile p = tail_mass_profile(spec.amps, SobolevIndex{c.sigma}, c.n, spec.law);
  w.field("sigma", c.sigma).key("product_values").begin_array();
  for (const double lp : p.log_products) w.value(std::exp(lp));
  w.end_array().end_object();
  o.artifacts.push_back({"", w.str() + "\n"});
  return o;
}

Outcome run_tailmass(const ExperimentConfig& c) {
  Outcome o;
  const AmplitudeSequence amps = c.amplitude_sequence();
  const RadialLaw law = c.radial_law();
  const TailMassProfile p = tail_mass_profile(amps, SobolevIndex{c.sigma}, c.n, law);
  if (!json(c)) {
    std::string body = "N,factor,product,log_product,partial_sum\n";
    for (std::size_t i = 0; i < p.factors.size(); ++i) {
      body += std::to_string(i + 1) + "," + fmt(p.factors[i]) + "," + fmt(std::exp(p.log_products[i])) + "," +
              fmt(p.log_products[i]) + "," + fmt(p.partial_sums[i]) + "\n";
    }
    o.artifacts.push_back({"", body});
    return o;
  }
  const SigmaClassification cls = classify_sigma(amps, SobolevIndex{c.sigma}, c.n);
  JsonWriter w;
  w.begin_object()
      .field("law", law.name())
      .field("amps", amps.describe())
      .field("sigma", c.sigma)
      .field("N", c.n)
      .field("series", to_string(cls.verdict));
  w.key("rows").begin_array();
  for (std::size_t i = 0; i < p.factors.size(); ++i) {
    w.begin_object()
        .field("N", i + 1)
        .field("factor", p.factors[i])
        .field("product", std::exp(p.log_products[i]))
        .field("log_product", p.log_products[i])
        .field("partial_sum", p.partial_sums[i])
        .end_object();
  }
  w.end_array().end_object();
  o.artifacts.push_back({"", w.str() + "\n"});
  return o;
}

constexpr double kCenteredTolerance = 0.10;
constexpr double kPhaseTolerance = 0.15;

Outcome run_renorm(const ExperimentConfig& c) {
  Outcome o;
  const RenormContext ctx(c.amplitude_sequence(), c.radial_law());
  PhaseDiagnosticOptions opts;
  opts.keep_trajectories = c.dump_trajectories;
  opts.workers = c.workers;
  const PhaseDiagnostic d = phase_convergence_diagnostic(ctx, c.n, c.grid, c.samples, *c.seed, opts);
  o.stream_count = c.samples;
  const bool pass = d.centered_within(kCenteredTolerance) && d.phases_within(kPhaseTolerance);
  o.verdict = pass ? Verdict::pass : Verdict::fail;

  if (json(c)) {
    JsonWriter w;
    w.begin_object()
        .field("mode", d.mode)
        .field("samples", d.samples)
        .field("seed", d.seed)
        .field("action_variance", ctx.action_variance());
    w.key("increments").begin_array();
    for (const auto& g : d.increments) {
      w.begin_object()
          .field("from", g.from)
          .field("to", g.to)
          .field("empirical_var", g.empirical_centered_var)
          .field("predicted_var", g.predicted_centered_var)
          .field("ratio", g.centered_ratio)
          .field("empirical_phase_msq", g.empirical_phase_msq)
          .field("phase_msq_std_error", g.phase_msq_std_error)
          .field("predicted_phase_msq", g.predicted_phase_msq)
          .field("phase_ratio", g.phase_ratio)
          .end_object();
    }
    w.end_array().field("verdict", pass ? "pass" : "fail").end_object();
    o.artifacts.push_back({"", w.str() + "\n"});
  } else {
    std::string body =
        "N,M,empirical_var,predicted_var,ratio,empirical_phase_msq,phase_msq_std_error,predicted_phase_msq,"
        "phase_ratio\n";
    for (const auto& g : d.increments) {
      body += std::to_string(g.from) + "," + std::to_string(g.to) + "," + fmt(g.empirical_centered_var) + "," +
              fmt(g.predicted_centered_var) + "," + fmt(g.centered_ratio) + "," + fmt(g.empirical_phase_msq) +
              "," + fmt(g.phase_msq_std_error) + "," + fmt(g.predicted_phase_msq) + "," + fmt(g.phase_ratio) +
              "\n";
    }
    o.artifacts.push_back({"", body});
  }
  if (c.dump_trajectories) {
    std::string body = "sample,N,phase\n";
    const std::size_t cols = d.grid.size();
    for (std::size_t i = 0; i < d.samples; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        body += std::to_string(i) + "," + std::to_string(d.grid[j]) + "," + fmt(d.trajectories[i * cols + j]) +
                "\n";
      }
    }
    o.artifacts.push_back({".trajectories.csv", body});
  }
  return o;
}

Outcome run_invariance(const ExperimentConfig& c) {
  Outcome o;
  InvarianceSetup setup;
  setup.ensemble = {c.amplitude_sequence(), c.radial_law(), c.n};
  setup.flow = c.negative_control ? FlowKind::broken
               : c.flow == "renormalized" ? FlowKind::renormalized
                                          : FlowKind::truncated;
  setup.functionals = select_functionals(c.functionals);
  setup.samples = c.samples;
  setup.seed = *c.seed;
  setup.workers = c.workers;
  const auto start = std::chrono::steady_clock::now();
  const auto reports = invariance_test(setup, c.t);
  const double runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  o.stream_count = c.samples;
  const bool pass = std::all_of(reports.begin(), reports.end(), [](const InvarianceReport& r) { return r.pass; });
  o.verdict = pass ? Verdict::pass : Verdict::fail;

  if (json(c)) {
    JsonWriter w;
    w.begin_object().key("config");
    write_echo(w, c);
    w.field("flow", to_string(setup.flow)).field("seed", *c.seed).field("samples", c.samples);
    w.key("per_functional").begin_array();
    for (const auto& r : reports) {
      w.begin_object()
          .field("id", r.functional)
          .field("t", r.t)
          .field("mean_before", r.mean_before)
          .field("mean_after", r.mean_after)
          .field("std_error", r.std_error)
          .field("z", r.z_score)
          .field("verdict", r.pass ? "pass" : "fail")
          .end_object();
    }
    w.end_array().field("verdict", pass ? "pass" : "fail").field("runtime_ms", runtime_ms).end_object();
    o.artifacts.push_back({"", w.str() + "\n"});
    return o;
  }
  std::string body = "id,t,mean_before,mean_after,std_error,z,verdict\n";
  for (const auto& r : reports) {
    body += r.functional + "," + fmt(r.t) + "," + fmt(r.mean_before) + "," + fmt(r.mean_after) + "," +
            fmt(r.std_error) + "," + fmt(r.z_score) + "," + (r.pass ? "pass" : "fail") + "\n";
  }
  o.artifacts.push_back({"", body});
  return o;
}

Outcome run_weakconv(const ExperimentConfig& c) {
  Outcome o;
  const auto panel = builtin_functionals();
  const TestFunctional& f = find_functional(panel, c.functional);
  const auto r = weak_convergence_test(c.amplitude_sequence(), c.radial_law(), f, c.grid, c.n_ref, c.samples,
                                       *c.seed, c.workers);
  o.stream_count = c.samples;
  o.verdict = r.stabilized() ? Verdict::pass : Verdict::fail;

  if (json(c)) {
    JsonWriter w;
    w.begin_object()
        .field("functional", r.functional)
        .field("arity", r.arity)
        .field("reference_N", r.reference_N)
        .field("reference_mean", r.reference.mean)
        .field("reference_std_error", r.reference.std_error);
    w.key("points").begin_array();
    for (const auto& p : r.points) {
      w.begin_object()
          .field("N", p.N)
          .field("mean", p.estimate.mean)
          .field("std_error", p.estimate.std_error)
          .field("z_vs_reference", p.z_vs_reference)
          .field("within_3sigma", p.within_3sigma)
          .field("exact_repeat", p.exact_repeat)
          .end_object();
    }
    w.end_array().field("verdict", r.stabilized() ? "pass" : "fail").end_object();
    o.artifacts.push_back({"", w.str() + "\n"});
    return o;
  }
  std::string body = "N,mean,std_error,z_vs_reference,within_3sigma,exact_repeat\n";
  for (const auto& p : r.points) {
    body += std::to_string(p.N) + "," + fmt(p.estimate.mean) + "," + fmt(p.estimate.std_error) + "," +
            fmt(p.z_vs_reference) + "," + (p.within_3sigma ? "true" : "false") + "," +
            (p.exact_repeat ? "true" : "false") + "\n";
  }
  body += std::to_string(r.reference_N) + "," + fmt(r.reference.mean) + "," + fmt(r.reference.std_error) +
          ",0,true,false\n";
  o.artifacts.push_back({"", body});
  return o;
}

Outcome run_gibbs(const ExperimentConfig& c) {
  Outcome o;
  GibbsSpec spec;
  spec.N = c.n;
  spec.cutoff.kind = c.cutoff == "plateau" ? CutoffProfile::Kind::plateau : CutoffProfile::Kind::triangular;
  spec.cutoff.a = c.cutoff_a;
  spec.cutoff.ramp = c.cutoff_ramp;
  const auto functionals = select_functionals(c.functionals);
  const GibbsReport r = gibbs_weighted_statistics(spec, functionals, c.samples, *c.seed, c.t, c.workers);
  o.stream_count = c.samples;
  const bool pass =
      std::all_of(r.functionals.begin(), r.functionals.end(), [](const GibbsFunctionalReport& f) { return f.pass; });
  o.verdict = pass ? Verdict::pass : Verdict::fail;

  if (json(c)) {
    JsonWriter w;
    w.begin_object()
        .field("N", spec.N)
        .field("t", r.t)
        .field("seed", r.seed)
        .field("samples", r.samples)
        .field("retained", r.retained)
        .field("effective_sample_size", r.effective_sample_size)
        .field("renorm_constant", r.renorm_constant)
        .field("max_log_weight_drift", r.max_log_weight_drift);
    w.key("per_functional").begin_array();
    for (const auto& f : r.functionals) {
      w.begin_object()
          .field("id", f.functional)
          .field("weighted_mean_before", f.weighted_mean_before)
          .field("std_error_before", f.std_error_before)
          .field("z_zero", f.z_zero)
          .field("weighted_mean_after", f.weighted_mean_after)
          .field("paired_std_error", f.paired_std_error)
          .field("z_paired", f.z_paired)
          .field("verdict", f.pass ? "pass" : "fail")
          .end_object();
    }
    w.end_array().field("verdict", pass ? "pass" : "fail").end_object();
    o.artifacts.push_back({"", w.str() + "\n"});
    return o;
  }
  std::string body =
      "id,weighted_mean_before,std_error_before,z_zero,weighted_mean_after,paired_std_error,z_paired,verdict,"
      "effective_sample_size\n";
  for (const auto& f : r.functionals) {
    body += f.functional + "," + fmt(f.weighted_mean_before) + "," + fmt(f.std_error_before) + "," +
            fmt(f.z_zero) + "," + fmt(f.weighted_mean_after) + "," + fmt(f.paired_std_error) + "," +
            fmt(f.z_paired) + "," + (f.pass ? "pass" : "fail") + "," + fmt(r.effective_sample_size) + "\n";
  }
  o.artifacts.push_back({"", body});
  return o;
}

Outcome dispatch(const ExperimentConfig& c) {
  const std::string& sub = c.subcommand;
  if (sub == "flow") return run_flow(c);
  if (sub == "sample") return run_sample(c);
  if (sub == "tailmass") return run_tailmass(c);
  if (sub == "renorm") return run_renorm(c);
  if (sub == "invariance") return run_invariance(c);
  if (sub == "weakconv") return run_weakconv(c);
  if (sub == "gibbs") return run_gibbs(c);
  throw InvalidArgument("unknown subcommand '" + sub + "'");
}

std::string manifest(const ExperimentConfig& c, const Outcome& o, double runtime_ms, int exit_code,
                     const std::string& error) {
  JsonWriter w;
  w.begin_object().field("artifact", "bolab").field("version", version()).key("config");
  write_echo(w, c);
  w.field("workers", c.workers).field("runtime_ms", runtime_ms).field("exit_code", exit_code);
  w.field("verdict", o.verdict == Verdict::none ? "none" : o.verdict == Verdict::pass ? "pass" : "fail");
  if (!error.empty()) w.field("error", error);
  w.key("substreams").begin_array();
  if (o.stream_count > 0) {
    for (const auto& r : partition_work(o.stream_count, c.workers)) {
      w.begin_object()
          .field("worker", r.worker)
          .field("stream_begin", r.begin)
          .field("stream_end", r.end)
          .end_object();
    }
  }
  w.end_array();
  w.key("outputs").begin_array();
  for (const auto& a : o.artifacts) w.value(c.out.empty() ? std::string("<stdout>") : c.out + a.suffix);
  w.end_array().end_object();
  return w.str() + "\n";
}

class FileSink {
 public:
  explicit FileSink(const std::string& path) : path_(path), file_(path, std::ios::binary | std::ios::trunc) {
    if (!file_) throw IoError("cannot open '" + path + "' for writing");
  }
  void write(const std::string& body) {
    file_ << body;
    file_.flush();
    if (!file_) throw IoError("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ofstream file_;
};

}  // namespace

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const bool to_files = !config.out.empty();
  std::optional<FileSink> data;
  try {
    if (to_files) data.emplace(config.out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Outcome outcome;
  int code = kExitPass;
  std::string error;
  try {
    outcome = dispatch(config);
    code = outcome.verdict == Verdict::fail ? kExitVerdictFailure : kExitPass;
  } catch (const DegenerateWeightsError& e) {
    error = e.what();
    outcome.verdict = Verdict::fail;
    code = kExitVerdictFailure;
  } catch (const IoError& e) {
    error = e.what();
    code = kExitUsage;
  } catch (const Error& e) {
    error = e.what();
    code = kExitUsage;
  }
  if (!error.empty()) err << "error: " << error << "\n";

  try {
    for (const auto& a : outcome.artifacts) {
      if (!to_files) {
        if (!a.suffix.empty()) out << "\n";
        out << a.body;
      } else if (a.suffix.empty()) {
        data->write(a.body);
      } else {
        FileSink(config.out + a.suffix).write(a.body);
      }
    }
    const double runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const std::string m = manifest(config, outcome, runtime_ms, code, error);
    if (to_files) {
      FileSink(config.out + ".manifest.json").write(m);
    } else {
      err << m;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return code;
}

}  // namespace bolab
