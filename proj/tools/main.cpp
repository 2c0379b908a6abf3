#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace anyon::cli;
  CLI::App app{"Anyonic dephasing simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ANYON_VERSION);

  Options opts;
  std::string config_path, preset_name;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file or result envelope")->check(CLI::ExistingFile);
    sub->add_option("--set", opts.sets, "Override KEY=VALUE with a dotted key; VALUE is JSON");
    sub->add_option("--output-dir", opts.output_dir, "Directory for <command>.json/.csv")->capture_default_str();
    sub->add_option("--workers", opts.workers, "Worker threads (0 = all)")->capture_default_str();
    sub->add_option("--seed", seed, "Master seed (overrides ensemble.master_seed)");
    sub->add_option("--preset", preset_name, "Built-in config to start from");
  };
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, "");
    add_common(sub);
    sub->callback([&opts, name] { opts.command = name; });
  }
  app.get_subcommand("algebra-check")->description("Check the distorted exchange algebra over a grid of angles");
  app.get_subcommand("sweep")->description("Dephasing rate versus statistical angle for each noise correlation");
  app.get_subcommand("converge")->description("Trajectory ensembles against the master equation");
  app.get_subcommand("spectrum")->description("Liouvillian spectrum and exceptional-point sweep");
  app.get_subcommand("lifetime")->description("Optimal angle and effective lifetime of a two-mode state");
  app.get_subcommand("dfs")->description("Noiseless collective modes of the link correlation matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--config")) opts.config_path = config_path;
    if (sub->count("--preset")) opts.preset = preset_name;
    if (sub->count("--seed")) opts.seed = seed;
  }
  return execute(opts);
}
