#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "csmom/config.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out_dir;
  std::string cache_dir;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c, bool needs_config = true) {
  auto* opt = sub->add_option("-c,--config", c.config_path,
                              "experiment config file");
  if (needs_config) opt->required();
  sub->add_option("-o,--out", c.out_dir, "output directory (overrides config)");
  sub->add_option("--cache", c.cache_dir, "operator cache directory");
  sub->add_option("-j,--threads", c.threads, "worker threads across frequency points")
      ->check(CLI::PositiveNumber);
}

int dispatch(const Common& c,
             csmom::RunSummary (*cmd)(const csmom::ExperimentConfig&,
                                      const csmom::RunOptions&)) {
  const auto cfg = csmom::parse_config_file(c.config_path);
  const csmom::RunOptions opt{c.out_dir, c.cache_dir, c.threads};
  const auto summary = cmd(cfg, opt);
  std::printf("runs: %d  failed: %d\n", summary.attempted, summary.failed);
  return summary.failed > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combined-source moment-method scattering workbench"};
  app.require_subcommand(1);

  Common solve_c, spectrum_c, mesh_c, trade_c;
  auto* solve = app.add_subcommand(
      "solve", "solve the configured formulations over the frequency list");
  solve->alias("sweep");
  add_common(solve, solve_c);
  auto* spectrum = app.add_subcommand(
      "spectrum", "singular spectra and condition numbers of the system matrices");
  add_common(spectrum, spectrum_c);
  auto* mesh = app.add_subcommand("mesh-info", "mesh quality report");
  add_common(mesh, mesh_c);
  auto* trade = app.add_subcommand(
      "alpha-tradeoff", "iteration/accuracy tradeoff over source weights");
  add_common(trade, trade_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return dispatch(solve_c, csmom::cmd_solve);
    if (spectrum->parsed()) return dispatch(spectrum_c, csmom::cmd_spectrum);
    if (mesh->parsed()) return dispatch(mesh_c, csmom::cmd_mesh_info);
    return dispatch(trade_c, csmom::cmd_alpha_tradeoff);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
