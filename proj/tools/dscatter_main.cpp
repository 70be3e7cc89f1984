#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <dscatter/config.hpp>
#include <dscatter/runner.hpp>

int main(int argc, char** argv) {
  CLI::App app{"scattering engine for emitter arrays and separable potentials"};
  app.footer(
      "tasks:\n"
      "  sweep         boundary S-matrix and det S over an energy grid\n"
      "  universal     compare S near threshold against the zero-energy limit\n"
      "  bound-states  locate zeros of J off the continuum\n"
      "  levinson      winding of det S against the bound state count\n"
      "  validate      model sanity checks and bright-state detection");

  std::string task;
  std::string config_path;
  std::string out_dir = "out";
  dscatter::run::CliOverrides ov;
  double tol_lev = 0.0, e_min = 0.0, e_max = 0.0;
  int points = 0;

  app.add_option("task", task, "one of: sweep, universal, bound-states, levinson, validate")
      ->required()
      ->check(CLI::IsMember({"sweep", "universal", "bound-states", "levinson", "validate"}));
  app.add_option("--config", config_path, "path to the JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory (created if missing)");
  auto* otol = app.add_option("--tol-lev", tol_lev, "verdict tolerance override");
  auto* omin = app.add_option("--e-min", e_min, "smallest |E| on sweep grids");
  auto* omax = app.add_option("--e-max", e_max, "largest |E| on sweep grids");
  auto* opts = app.add_option("--points", points, "sweep grid points per branch");

  CLI11_PARSE(app, argc, argv);

  if (otol->count() > 0) ov.tol_lev = tol_lev;
  if (omin->count() > 0) ov.e_min = e_min;
  if (omax->count() > 0) ov.e_max = e_max;
  if (opts->count() > 0) ov.points = points;

  try {
    const dscatter::cfg::RunConfig config = dscatter::cfg::load_config(config_path);
    return dscatter::run::run_task(task, config, out_dir, ov);
  } catch (const dscatter::ScatterError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", dscatter::errc_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
