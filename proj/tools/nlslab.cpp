// nlslab: command-line front end. Flags become config keys and override the
// --config file; everything else happens in run_command.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "nlslab/cli.hpp"
#include "nlslab/config.hpp"

namespace {

const char* const kGlobal[] = {"seed", "out", "threads", "grid.N", "grid.m", "time.T", "time.M"};

const std::map<std::string, std::string> kAbout{
    {"norms", "evaluate norms of initial data"},
    {"evolve", "split-step evolution with mass, energy and M_{2,4} history"},
    {"picard", "Picard iteration of the Duhamel map, compared with split-step"},
    {"verify-strichartz", "Strichartz ratio across a resolution doubling"},
    {"verify-bilinear", "bilinear high-frequency gain: kernel, identity, lambda sweep"},
    {"verify-restriction", "L^4 restriction bound with sqrt-log loss"},
    {"verify-embeddings", "modulation, Fourier-Lebesgue and Orlicz embedding constants"},
    {"verify-scaling", "Orlicz norm growth under dilation, with the sharpness example"},
    {"verify-persistence", "persistence of the Orlicz-modulation norm along the flow"},
    {"vpnorm", "exact V^p norm of a sampled path"},
    {"orlicz-conjugate", "convex conjugate of a Young function"},
    {"acceptance", "run every acceptance criterion"},
};

bool is_global(const std::string& key) {
  for (const char* g : kGlobal)
    if (key == g) return true;
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlslab: numerical laboratory for cubic NLS with rough data"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "config file (key = value, [section] headers)");
  app.add_option("--seed", overrides["seed"], "seed for every random draw");
  app.add_option("--out", overrides["out"], "output directory");
  app.add_option("--threads", overrides["threads"], "worker threads for sweeps");
  app.add_option("--grid.N", overrides["grid.N"], "number of Fourier modes");
  app.add_option("--grid.m", overrides["grid.m"], "modes per unit frequency");
  app.add_option("--time.T", overrides["time.T"], "time horizon");
  app.add_option("--time.M", overrides["time.M"], "time steps");

  for (const auto& name : nlslab::command_names()) {
    auto* sub = app.add_subcommand(name, kAbout.at(name));
    for (const auto& k : nlslab::command_keys(name)) {
      if (k.key == "command" || is_global(k.key)) continue;
      std::string help = k.help;
      if (!k.default_value.empty()) help += " [" + k.default_value + "]";
      sub->add_option("--" + k.key, overrides[k.key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlslab::error_json("usage", "", e.what()) << "\n";
    return nlslab::kExitConfigError;
  }

  try {
    nlslab::RunConfig config = config_path.empty() ? nlslab::RunConfig{} : nlslab::RunConfig::load(config_path);
    auto collect = [&](const CLI::App* a) {
      for (const CLI::Option* opt : a->get_options()) {
        const std::string key = opt->get_single_name();
        if (opt->count() > 0 && overrides.count(key)) config.set(key, overrides[key]);
      }
    };
    collect(&app);
    for (const auto* sub : app.get_subcommands()) collect(sub);
    if (!app.get_subcommands().empty()) config.set("command", app.get_subcommands().front()->get_name());
    return nlslab::run_command(config, std::cout);
  } catch (const nlslab::ConfigError& e) {
    std::cerr << nlslab::error_json("config", e.key(), e.what()) << "\n";
    return nlslab::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << nlslab::error_json("runtime", "", e.what()) << "\n";
    return nlslab::kExitCriterionFailure;
  }
}
