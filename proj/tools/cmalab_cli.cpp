// Experiment driver: one subcommand per experiment plus validate-config and list.
// Exit codes: 0 pass, 1 a checked inequality failed, 2 bad config or usage,
// 3 a library error during the run.
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cmalab/experiment.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

std::filesystem::path resolve_out(const RunFlags& flags, const cmalab::ExperimentConfig& config) {
  if (!flags.out.empty()) return flags.out;
  if (const char* env = std::getenv("CMALAB_OUT_DIR"); env && *env) return env;
  return config.out_dir;
}

int run(const std::string& name, const RunFlags& flags) {
  cmalab::ExperimentConfig config;
  try {
    config = cmalab::load_config(flags.config);
  } catch (const cmalab::Error& e) {
    std::cerr << flags.config << ": " << e.what() << '\n';
    return 2;
  }
  if (config.experiment != name) {
    std::cerr << flags.config << ": config is for '" << config.experiment << "', not '" << name << "'\n";
    return 2;
  }
  if (flags.seed) config.density.seed = *flags.seed;
  const auto dir = resolve_out(flags, config);
  config.out_dir = dir.string();
  try {
    const auto outcome = cmalab::run_experiment(config);
    cmalab::write_outputs(outcome, dir, config.dump_fields);
    if (!flags.quiet) {
      std::cout << name << ": " << (outcome.pass ? "pass" : "FAIL") << '\n'
                << outcome.report.at("results").dump(2) << '\n'
                << "wrote " << (dir / "report.json").string() << '\n';
    }
    return outcome.pass ? 0 : 1;
  } catch (const cmalab::Error& e) {
    std::cerr << name << ": " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmalab: comparison-method experiments on flat tori"};
  app.require_subcommand(1);

  std::vector<RunFlags> flags(cmalab::experiment_names().size());
  int status = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const auto& name = cmalab::experiment_names()[i];
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", flags[i].config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags[i].out, "output directory (overrides CMALAB_OUT_DIR and the config)");
    sub->add_option("--seed", flags[i].seed, "density seed override");
    sub->add_flag("--quiet", flags[i].quiet, "suppress the console summary");
    sub->callback([&, i, name] { status = run(name, flags[i]); });
  }

  std::string check_path;
  auto* validate = app.add_subcommand("validate-config", "parse a config and print the resolved form");
  validate->add_option("config", check_path, "config file")->required();
  validate->callback([&] {
    try {
      std::cout << cmalab::load_config(check_path).to_json().dump(2) << '\n';
    } catch (const cmalab::Error& e) {
      std::cerr << check_path << ": " << e.what() << '\n';
      status = 2;
    }
  });

  app.add_subcommand("list", "list the experiments")->callback([] {
    for (const auto& name : cmalab::experiment_names()) std::cout << name << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  return status;
}
