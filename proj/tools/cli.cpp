#include "cli.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bolab/config.hpp"
#include "bolab/error.hpp"
#include "bolab/runner.hpp"

namespace bolab {

namespace {

struct SubcommandFlags {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;  // key name -> raw text
  std::map<std::string, bool> switches;
};

std::string describe(const ConfigKey& key, const std::string& sub) {
  std::string text = key.help + " [" + key.value_type + "]";
  if (const auto def = key.default_for(sub); def && !def->empty()) text += " (default: " + *def + ")";
  return text;
}

std::string flag_names(const ConfigKey& key) {
  std::string names = key.flag;
  for (const auto& alias : key.flag_aliases) names += "," + alias;
  return names;
}

void register_subcommand(CLI::App& root, const std::string& sub, SubcommandFlags& flags) {
  static const std::map<std::string, std::string> blurbs = {
      {"flow", "evolve a state with the truncated flow"},
      {"sample", "draw states from a randomized ensemble"},
      {"tailmass", "tail-mass product profile for a ball criterion"},
      {"renorm", "renormalized phase convergence diagnostic"},
      {"invariance", "paired invariance test of the flow"},
      {"weakconv", "weak convergence of truncated ensembles"},
      {"gibbs", "weighted Gibbs-measure invariance test"},
  };
  flags.app = root.add_subcommand(sub, blurbs.at(sub));
  flags.app->add_option("config", flags.config_path, "config file (key = value lines)");
  for (const auto& key : config_schema()) {
    if (!key.applies(sub)) continue;
    if (key.value_type == "bool") {
      flags.switches[key.name] = false;
      flags.app->add_flag(flag_names(key), flags.switches[key.name], describe(key, sub));
    } else {
      flags.app->add_option(flag_names(key), flags.values[key.name], describe(key, sub))
          ->type_name(key.value_type);
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized Birkhoff-coordinate flow experiments"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  std::map<std::string, SubcommandFlags> flags;
  for (const auto& sub : subcommands()) register_subcommand(app, sub, flags[sub]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help;
    app.exit(e, help, help);
    out << help.str();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream help;
    app.exit(e, help, help);
    out << help.str();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  SubcommandFlags& f = flags[sub];
  try {
    std::vector<std::string> violations;
    std::vector<ConfigEntry> entries;
    if (!f.config_path.empty()) entries = parse_entries(read_file(f.config_path), violations);
    auto override_key = [&](const std::string& name, const std::string& value) {
      std::erase_if(entries, [&](const ConfigEntry& e) { return e.key == name; });
      entries.push_back({name, value, 0});
    };
    for (const auto& [name, value] : f.values) {
      const ConfigKey* key = find_config_key(name);
      if (f.app->count(key->flag) > 0) override_key(name, value);
    }
    for (const auto& [name, on] : f.switches) {
      if (on) override_key(name, "true");
    }
    std::optional<ExperimentConfig> config;
    try {
      config = build_config(sub, entries);
    } catch (const ConfigError& e) {
      violations.insert(violations.end(), e.violations().begin(), e.violations().end());
    }
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return run(*config, out, err);
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) err << "config error: " << v << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace bolab
