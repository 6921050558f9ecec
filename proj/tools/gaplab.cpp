// gaplab: gap labelling of 2d magnetic Bloch bands at rational flux.
//
// Verbs: butterfly, streda, normgap, adiabatic, wannier, purify.
// Exit codes: 0 success, 1 contract violation, 2 usage error.

#include <CLI11.hpp>

#include <iostream>

#include "gaplab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical gap-labelling laboratory for magnetic Bloch bands"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, backend;
  int threads = 0;
  app.add_option("--config", config_path, "plain-text key = value configuration file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--threads", threads, "worker threads (overrides config)");
  app.add_option("--backend", backend, "lattice or continuum (overrides config)")
      ->check(CLI::IsMember({"lattice", "continuum"}));

  const std::vector<std::string> verbs = {"butterfly", "streda",  "normgap",
                                          "adiabatic", "wannier", "purify"};
  for (const auto& v : verbs) app.add_subcommand(v);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    gaplab::RunConfig cfg;
    if (!config_path.empty()) cfg = gaplab::parse_config_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (backend == "lattice") cfg.backend = gaplab::Backend::Lattice;
    if (backend == "continuum") cfg.backend = gaplab::Backend::Continuum;

    const std::string verb = app.get_subcommands().front()->get_name();
    return gaplab::run_experiment(verb, cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
