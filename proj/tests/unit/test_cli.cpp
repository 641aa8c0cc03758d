#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "bolab/flow.hpp"
#include "bolab/state.hpp"
#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bolab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bolab::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string strip_runtime(const std::string& s) {
  return std::regex_replace(s, std::regex("\"runtime_ms\":[-+0-9.eE]+"), "\"runtime_ms\":0");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("bolab_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help is generated from the schema") {
    const auto top = run({"--help"});
    CHECK(top.code == 0);
    for (const char* sub : {"flow", "sample", "tailmass", "renorm", "invariance", "weakconv", "gibbs"}) {
      CHECK(top.out.find(sub) != std::string::npos);
    }
    const auto flow = run({"flow", "--help"});
    CHECK(flow.code == 0);
    for (const char* flag : {"--n", "--t", "--state", "--profile", "--s", "--seed", "--workers", "--out", "--format"}) {
      CHECK(flow.out.find(flag) != std::string::npos);
    }
    const auto renorm = run({"renorm", "--help"});
    for (const char* flag : {"--alpha-p", "--grid", "--samples", "--dump-trajectories"}) {
      CHECK(renorm.out.find(flag) != std::string::npos);
    }
    CHECK(run({"invariance", "--help"}).out.find("--negative-control") != std::string::npos);
    CHECK(run({"--version"}).code == 0);
  }

  TEST_CASE("usage errors exit with 1") {
    CHECK(run({}).code == 1);
    CHECK(run({"flow", "--bogus"}).code == 1);
    CHECK(run({"sample", "--n", "3"}).code == 1);
    CHECK(run({"flow", "--seed", "1", "--n", "x"}).code == 1);
    CHECK(run({"flow", "/nonexistent/config.txt"}).code == 1);
    const auto unwritable = run({"flow", "--seed", "1", "--out", "/nonexistent/dir/out.csv"});
    CHECK(unwritable.code == 1);
    CHECK(unwritable.err.find("/nonexistent/dir/out.csv") != std::string::npos);
    const auto missing_state = run({"flow", "--state", "/nonexistent/state.csv"});
    CHECK(missing_state.code == 1);
    CHECK(missing_state.err.find("/nonexistent/state.csv") != std::string::npos);
  }

  TEST_CASE("invariance verdicts map to exit codes") {
    const auto good = run({"invariance", "--seed", "3", "--n", "4", "--samples", "20000"});
    CHECK(good.code == 0);
    CHECK(good.out.find("\"per_functional\"") != std::string::npos);
    CHECK(good.out.find("\"config\"") != std::string::npos);
    CHECK(good.out.find("\"runtime_ms\"") != std::string::npos);
    const auto bad = run({"invariance", "--seed", "3", "--n", "4", "--samples", "20000", "--negative-control"});
    CHECK(bad.code == 2);
    const auto degenerate = run({"gibbs", "--seed", "1", "--samples", "10000", "--cutoff-a", "0.001"});
    CHECK(degenerate.code == 2);
  }

  TEST_CASE("config file with command line override") {
    const fs::path dir = scratch();
    const fs::path cfg = dir / "flow.cfg";
    std::ofstream(cfg) << "# flow run\nsubcommand = flow\nseed = 5\nn = 3\nt = 0.5\n";
    const auto from_file = run({"flow", cfg.string()});
    CHECK(from_file.code == 0);
    CHECK(std::count(from_file.out.begin(), from_file.out.end(), '\n') == 4);
    const auto overridden = run({"flow", cfg.string(), "--n", "5"});
    CHECK(std::count(overridden.out.begin(), overridden.out.end(), '\n') == 6);
    const auto wrong = run({"sample", cfg.string()});
    CHECK(wrong.code == 1);
    CHECK(wrong.err.find("does not match") != std::string::npos);
  }

  TEST_CASE("flow from a state file writes data, profile and manifest") {
    const fs::path dir = scratch();
    const bolab::BirkhoffState z(std::vector<bolab::complex>{{1.0, 0.0}, {0.5, 0.25}, {0.0, -0.125}});
    {
      std::ofstream f(dir / "state.csv");
      bolab::write_state_csv(f, z);
    }
    const fs::path out = dir / "evolved.csv";
    const auto r = run({"flow", "--state", (dir / "state.csv").string(), "--t", "0.7", "--profile", "1,2,3",
                        "--out", out.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(out);
    CHECK(bolab::read_state_csv(in) == bolab::flow_truncated(z, {3, 0.7}));
    const std::string profile = slurp(out.string() + ".profile.csv");
    CHECK(profile.rfind("N,distance\n", 0) == 0);
    CHECK(profile.find("3,0\n") != std::string::npos);
    const std::string manifest = slurp(out.string() + ".manifest.json");
    CHECK(manifest.find("\"version\"") != std::string::npos);
    CHECK(manifest.find("\"runtime_ms\"") != std::string::npos);
    CHECK(manifest.find("\"substreams\"") != std::string::npos);
    const auto json = run({"flow", "--state", (dir / "state.csv").string(), "--format", "json"});
    CHECK(json.code == 0);
    CHECK(json.out.find("\"state\":[[") != std::string::npos);
  }

  TEST_CASE("renorm dumps trajectories on request") {
    const fs::path out = scratch() / "renorm.csv";
    const auto r = run({"renorm", "--seed", "2", "--samples", "50", "--grid", "8,16,32", "--normalize-law",
                        "--dump-trajectories", "--out", out.string()});
    CHECK((r.code == 0 || r.code == 2));
    const std::string traj = slurp(out.string() + ".trajectories.csv");
    CHECK(std::count(traj.begin(), traj.end(), '\n') == 1 + 50 * 3);
    CHECK(slurp(out).rfind("N,M,empirical_var,predicted_var,ratio", 0) == 0);
  }

  TEST_CASE("payloads are identical across worker counts") {
    const std::vector<std::vector<std::string>> runs = {
        {"flow", "--seed", "1", "--n", "16", "--profile", "1,4,16"},
        {"sample", "--seed", "2", "--n", "5", "--samples", "300"},
        {"sample", "--seed", "2", "--n", "5", "--samples", "300", "--format", "json"},
        {"tailmass", "--n", "40", "--amps", "power_log", "--amp-q", "1", "--format", "json"},
        {"renorm", "--seed", "3", "--samples", "1000", "--grid", "16,32,64", "--normalize-law"},
        {"invariance", "--seed", "4", "--n", "8", "--samples", "2000"},
        {"invariance", "--seed", "4", "--n", "8", "--samples", "2000", "--format", "csv", "--flow", "renormalized",
         "--amp-p", "0.5"},
        {"weakconv", "--seed", "5", "--samples", "2000", "--grid", "1,2,4", "--n-ref", "16"},
        {"gibbs", "--seed", "6", "--samples", "10000", "--cutoff-a", "1"},
    };
    for (const auto& args : runs) {
      std::string reference;
      for (const char* workers : {"1", "2", "8"}) {
        auto with = args;
        with.push_back("--workers");
        with.push_back(workers);
        const auto r = run(with);
        CHECK(r.code != 1);
        const std::string payload = strip_runtime(r.out);
        if (reference.empty()) {
          reference = payload;
        } else {
          CHECK(payload == reference);
        }
      }
    }
  }
}
