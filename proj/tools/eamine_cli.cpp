// eamine: mine an enterprise architecture model from network and log evidence.

#include "eamine/error.hpp"
#include "eamine/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

int main(int argc, char **argv) {
  CLI::App app{"Mine an enterprise architecture model from scans, flows and logs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string target;
  std::string out_dir;
  bool strict = false;

  const std::vector<std::pair<eamine::Stage, std::pair<const char *, const char *>>> commands{
      {eamine::Stage::ingest, {"ingest", "Parse the sources and write the store snapshot"}},
      {eamine::Stage::build, {"build", "Build the generic model and dump it as JSON"}},
      {eamine::Stage::transform, {"transform", "Transform to the target metamodel, write the change log"}},
      {eamine::Stage::export_models, {"export", "Write the exchange XML and DOT graph"}},
      {eamine::Stage::report, {"report", "Write the markdown and structured reports"}},
      {eamine::Stage::all, {"run", "Run every stage and write all artifacts"}},
  };

  eamine::Stage stage = eamine::Stage::all;
  for (const auto &[s, names] : commands) {
    auto *sub = app.add_subcommand(names.first, names.second);
    sub->add_option("--config", config_path, "Run configuration (default: $EAMINE_CONFIG)");
    sub->add_option("--target", target, "Target metamodel name, overrides the config");
    sub->add_option("--out", out_dir, "Output directory, overrides the config");
    sub->add_flag("--strict", strict, "Exit 1 when any warning finding was raised");
    sub->callback([&stage, st = s] { stage = st; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? eamine::kExitOk : eamine::kExitFatal;
  }

  if (config_path.empty())
    config_path = eamine::default_config_path();
  if (config_path.empty()) {
    std::cerr << "eamine: error: no config given (use --config or set EAMINE_CONFIG)\n";
    return eamine::kExitFatal;
  }

  eamine::RunConfig cfg;
  try {
    cfg = eamine::load_run_config(config_path);
    if (!target.empty()) {
      if (!cfg.metamodels.count(target))
        throw eamine::ConfigError("--target: unknown metamodel '" + target + "'");
      cfg.target = target;
    }
    if (!out_dir.empty())
      cfg.output_dir = out_dir;
  } catch (const std::exception &e) {
    std::cerr << "eamine: error: " << e.what() << "\n";
    return eamine::kExitFatal;
  }
  return eamine::run_pipeline(cfg, stage, strict, std::cout, std::cerr);
}
