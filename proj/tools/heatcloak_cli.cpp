#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "heatcloak/error.hpp"
#include "heatcloak/io.hpp"
#include "heatcloak/parallel.hpp"
#include "heatcloak/scenarios.hpp"

namespace fs = std::filesystem;
using namespace heatcloak;

namespace {

struct Globals {
  std::string out;
  int parallel = 0;
  long long seed = -1;
  bool quiet = false;
};

fs::path output_root(const Globals& g) {
  if (!g.out.empty()) return g.out;
  if (const char* env = std::getenv("HEATCLOAK_OUT"); env && *env) return env;
  return "heatcloak_out";
}

void apply_seed(ScenarioConfig& cfg, const Globals& g) {
  if (g.seed >= 0) cfg.noise.seed = static_cast<std::uint64_t>(g.seed);
}

void print_summary(const ScenarioResult& r, const fs::path& dir, bool quiet) {
  if (quiet) return;
  std::cout << r.name << " (" << to_string(r.kind) << ") -> " << dir.string() << "\n";
  std::cout << metrics_csv(r.metrics);
  for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
}

int run_config(ScenarioConfig cfg, const fs::path& dir, const Globals& g) {
  apply_seed(cfg, g);
  const ScenarioResult r = run_scenario(cfg);
  write_result(r, cfg, dir);
  print_summary(r, dir, g.quiet);
  return 0;
}

// Refinement (space and time) and noise studies, one CSV row per configuration and time.
std::string sweep_csv(const std::string& study, double noise, long long seed, int grid, double final_time) {
  std::vector<std::pair<std::string, std::vector<ScenarioConfig>>> studies;
  if (study == "space" || study == "all") studies.push_back({"space", figure_preset(7)});
  if (study == "time" || study == "all") studies.push_back({"time", figure_preset(8)});
  if (study == "noise" || study == "all") studies.push_back({"noise", figure_preset(9)});
  if (studies.empty()) throw std::invalid_argument("unknown study '" + study + "'");
  std::ostringstream os;
  os.precision(17);
  os << "study,config,boundary_points,steps,noise,seed,t,relerr_minus,err_plus,err_minus,relerr_plus";
  os << ",noisy_relerr_minus,noisy_err_plus,noisy_err_minus,noisy_relerr_plus\n";
  for (auto& [name, configs] : studies) {
    for (auto& cfg : configs) {
      if (name == "noise") {
        cfg.noise.fraction = noise;
        if (seed >= 0) cfg.noise.seed = static_cast<std::uint64_t>(seed);
      }
      cfg.grid.nx = cfg.grid.ny = grid;
      if (final_time > 0.0 && final_time < cfg.final_time) {
        cfg.steps = static_cast<int>(std::lround(cfg.steps * final_time / cfg.final_time));
        cfg.final_time = final_time;
        std::vector<double> kept;
        for (double t : cfg.report_times)
          if (t <= final_time + 1e-12) kept.push_back(t);
        cfg.report_times = kept;
      }
      const ScenarioResult r = run_scenario(cfg);
      const bool noisy = cfg.noise.fraction > 0.0;
      for (size_t i = 0; i < r.metrics.rows.size(); ++i) {
        os << name << "," << cfg.name << "," << cfg.boundary_points << "," << cfg.steps << "," << cfg.noise.fraction
           << "," << cfg.noise.seed;
        for (const char* c : {"t", "relerr_minus", "err_plus", "err_minus", "relerr_plus"}) os << "," << r.metrics.at(i, c);
        for (const char* c : {"noisy_relerr_minus", "noisy_err_plus", "noisy_err_minus", "noisy_relerr_plus"}) {
          os << ",";
          if (noisy) os << r.metrics.at(i, c);
        }
        os << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-integral simulation of the 2-D heat equation: reproduction, cloaking and mimicking"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "Output directory (default $HEATCLOAK_OUT or ./heatcloak_out)");
  app.add_option("--parallel", g.parallel, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Noise seed override")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "Suppress summaries");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario config");
  run->add_option("config", config_path, "Config file")->required();

  int figure = 0;
  auto* fig = app.add_subcommand("figure", "Run a figure preset (3, 4, 7, 8, 9, 10, 11, 12)");
  fig->add_option("number", figure, "Figure number")->required();

  std::string study = "all";
  double noise = 0.03;
  int sweep_grid = 100;
  double sweep_final = 0.0;
  auto* sweep = app.add_subcommand("sweep", "Refinement and noise studies as CSV");
  sweep->add_option("--study", study, "space, time, noise or all")->check(CLI::IsMember({"space", "time", "noise", "all"}));
  sweep->add_option("--noise", noise, "Relative noise level")->check(CLI::NonNegativeNumber);
  sweep->add_option("--grid", sweep_grid, "Grid cells per side")->check(CLI::PositiveNumber);
  sweep->add_option("--final", sweep_final, "Truncate the simulated window");

  std::string field_path, png_path;
  bool log10 = false;
  std::vector<double> range;
  auto* render = app.add_subcommand("render", "Render a field file as PNG");
  render->add_option("field", field_path, "Field file")->required()->check(CLI::ExistingFile);
  render->add_option("--png", png_path, "Output image (default: field path with .png)");
  render->add_flag("--log10", log10, "Render log10 |value|");
  render->add_option("--range", range, "lo hi")->expected(2);

  auto* validate = app.add_subcommand("validate", "Parse and validate a config without running it");
  validate->add_option("config", config_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (g.parallel > 0) set_thread_count(g.parallel);
    const fs::path root = output_root(g);
    if (*run) {
      const ScenarioConfig cfg = load_config(config_path);
      return run_config(cfg, root / cfg.name, g);
    }
    if (*fig) {
      for (auto& cfg : figure_preset(figure)) run_config(cfg, root / ("fig" + std::to_string(figure)) / cfg.name, g);
      return 0;
    }
    if (*sweep) {
      const std::string csv = sweep_csv(study, noise, g.seed, sweep_grid, sweep_final);
      const fs::path path = root / ("sweep_" + study + ".csv");
      write_file_atomic(path, csv);
      if (!g.quiet) std::cout << csv;
      return 0;
    }
    if (*render) {
      FieldGrid grid = read_field_grid(field_path);
      if (log10) grid = log10_abs(grid);
      fs::path out = png_path.empty() ? fs::path(field_path).replace_extension(".png") : fs::path(png_path);
      std::optional<ColorRange> r;
      if (range.size() == 2) r = ColorRange{range[0], range[1]};
      const HeatmapInfo info = render_heatmap(grid, r, out);
      if (info.degenerate) std::cerr << "warning: degenerate color range, image is a single color\n";
      if (!g.quiet) std::cout << out.string() << " range " << info.range.lo << " " << info.range.hi << "\n";
      return 0;
    }
    if (*validate) {
      const ScenarioConfig cfg = load_config(config_path);
      if (!g.quiet) std::cout << config_path << ": ok (" << to_string(cfg.kind) << ")\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
