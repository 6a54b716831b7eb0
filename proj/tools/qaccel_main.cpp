// Command-line front end: levelmap, trajectory, montecarlo, tdse, and
// validate-config subcommands. Exit codes: 0 success, 2 config error,
// 3 numeric failure, 4 truncation/overflow.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "qaccel/io.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required();
  if (needs_out)
    cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

qaccel::ExperimentConfig load_config(const CommonArgs& args) {
  auto config = qaccel::ExperimentConfig::load(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  return config;
}

void report_files(const CommonArgs& args,
                  const std::vector<std::filesystem::path>& files) {
  if (args.quiet) return;
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adiabatic level-map acceleration experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  using Runner = std::vector<std::filesystem::path> (*)(
      const qaccel::ExperimentConfig&, const std::filesystem::path&);
  Runner runner = nullptr;

  auto* levelmap = app.add_subcommand(
      "levelmap", "emit the per-k renumbering table (plus trajectories)");
  add_common(levelmap, args, true);
  levelmap->callback([&] { runner = &qaccel::cmd_levelmap; });

  auto* trajectory =
      app.add_subcommand("trajectory", "iterate the level map from k0 values");
  add_common(trajectory, args, true);
  trajectory->callback([&] { runner = &qaccel::cmd_trajectory; });

  auto* montecarlo = app.add_subcommand(
      "montecarlo", "Bernoulli gain estimate and LLN slope table");
  add_common(montecarlo, args, true);
  montecarlo->callback([&] { runner = &qaccel::cmd_montecarlo; });

  auto* tdse = app.add_subcommand(
      "tdse", "one-period Schrodinger run with checkpoint populations");
  add_common(tdse, args, true);
  tdse->callback([&] { runner = &qaccel::cmd_tdse; });

  auto* validate =
      app.add_subcommand("validate-config", "parse and validate a config");
  add_common(validate, args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = load_config(args);
    if (validate->parsed()) {
      if (!args.quiet) std::printf("config ok\n");
      return 0;
    }
    report_files(args, runner(config, args.out_dir));
    return 0;
  } catch (const qaccel::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qaccel::TruncationError& e) {
    std::fprintf(stderr, "truncation/overflow: %s\n", e.what());
    return 4;
  } catch (const qaccel::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  }
}
