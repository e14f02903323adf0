#include <stdexcept>

#include "heatcloak/scenarios.hpp"

namespace heatcloak {

namespace {

const Circle kUnitDisk{{0.5, 0.5}, 0.25};

std::vector<double> every(double from, double to, double step) {
  std::vector<double> out;
  for (int i = 0; from + i * step <= to + 1e-12; ++i) out.push_back(from + i * step);
  return out;
}

ScenarioConfig reproduction(int figure) {
  ScenarioConfig c;
  c.kind = figure == 3 ? ScenarioKind::reproduce_interior : ScenarioKind::reproduce_exterior;
  c.name = "fig" + std::to_string(figure);
  c.cloak = kUnitDisk;
  c.sources = {PointSource{figure == 3 ? Vec2{0.25, 0.25} : Vec2{0.5, 0.55}}};
  c.k = 0.3;
  c.final_time = 0.2;
  c.steps = 200;
  c.boundary_points = 128;
  c.chosen["buffer"] = "0.05";
  c.chosen["log_range"] = "-8,0";
  c.chosen["product_window"] = "0.005";
  return c;
}

// Sensitivity studies: interior source (0,0), exterior source (0.5,0.55), k = 0.2, t in [0.1, 1].
ScenarioConfig sensitivity(bool interior, int n, int m, const std::string& name) {
  ScenarioConfig c;
  c.kind = interior ? ScenarioKind::reproduce_interior : ScenarioKind::reproduce_exterior;
  c.name = name;
  c.cloak = kUnitDisk;
  c.sources = {PointSource{interior ? Vec2{0.0, 0.0} : Vec2{0.5, 0.55}}};
  c.k = 0.2;
  c.final_time = 1.0;
  c.steps = m;
  c.boundary_points = n;
  c.grid.nx = c.grid.ny = 100;
  c.report_times = every(0.1, 1.0, 0.05);
  c.heatmaps = false;
  c.chosen["grid"] = "100x100";
  c.chosen["final_time"] = "1.0";
  c.chosen["report_times"] = "0.1:0.05:1.0";
  c.chosen["buffer"] = "0.05";
  c.chosen["product_window"] = "0.005";
  return c;
}

}  // namespace

std::vector<int> figure_numbers() { return {3, 4, 7, 8, 9, 10, 11, 12}; }

std::vector<ScenarioConfig> figure_preset(int figure) {
  switch (figure) {
    case 3:
    case 4:
      return {reproduction(figure)};
    case 7: {
      std::vector<ScenarioConfig> out;
      for (bool interior : {true, false})
        for (int n : {25, 50, 100}) {
          out.push_back(sensitivity(interior, n, 1000,
                                    std::string("fig7_") + (interior ? "interior" : "exterior") + "_n" + std::to_string(n)));
          out.back().chosen["boundary_points_levels"] = "25,50,100";
        }
      return out;
    }
    case 8: {
      std::vector<ScenarioConfig> out;
      for (bool interior : {true, false})
        for (int m : {250, 500, 1000}) {
          out.push_back(sensitivity(interior, 100, m,
                                    std::string("fig8_") + (interior ? "interior" : "exterior") + "_m" + std::to_string(m)));
          out.back().chosen["step_levels"] = "250,500,1000";
          // 0.05 spacing is off the coarsest grid (dt = 0.004)
          out.back().report_times = every(0.1, 1.0, 0.1);
          out.back().chosen["report_times"] = "0.1:0.1:1.0";
        }
      return out;
    }
    case 9: {
      std::vector<ScenarioConfig> out;
      for (bool interior : {true, false}) {
        out.push_back(sensitivity(interior, 100, 1000, std::string("fig9_") + (interior ? "interior" : "exterior")));
        out.back().noise = {0.03, 7};
        out.back().chosen["noise_seed"] = "7";
      }
      return out;
    }
    case 10: {
      ScenarioConfig c;
      c.kind = ScenarioKind::cloak_object;
      c.name = "fig10";
      c.cloak = Circle{{0.5, 0.5}, 1.0 / 3.0};
      c.object = Kite{{0.5, 0.5}, 0.1};
      c.sources = {PointSource{{0.9, 0.3}}};
      c.k = 0.2;
      c.final_time = 0.5;
      c.steps = 600;
      c.boundary_points = 128;
      c.object_points = 128;
      c.report_times = {0.05, 0.25, 0.5};
      c.chosen["object"] = "kite center (0.5,0.5) scale 0.1";
      c.chosen["object_points"] = "128";
      c.chosen["exact_lags"] = "8";
      c.chosen["report_times"] = "0.05,0.25,0.5";
      c.chosen["buffer"] = "0.05";
      c.chosen["product_window"] = "0.005";
      return {c};
    }
    case 11: {
      ScenarioConfig c;
      c.kind = ScenarioKind::mimic_source;
      c.name = "fig11";
      c.cloak = kUnitDisk;
      c.sources = {PointSource{{0.6, 0.4}}};
      c.mimic_sources = {PointSource{{0.39, 0.6}}};
      c.k = 0.3;
      c.final_time = 0.2;
      c.steps = 200;
      c.boundary_points = 128;
      c.chosen["cloak"] = "circle center (0.5,0.5) radius 0.25";
      c.chosen["diffusivity"] = "0.3";
      c.chosen["steps"] = "200";
      c.chosen["boundary_points"] = "128";
      c.chosen["buffer"] = "0.05";
      c.chosen["product_window"] = "0.005";
      return {c};
    }
    case 12: {
      ScenarioConfig c;
      c.kind = ScenarioKind::mimic_object;
      c.name = "fig12";
      c.cloak = kUnitDisk;
      c.object = Kite{{0.5, 0.5}, 0.08};
      c.standin = Flower{{0.5, 0.5}, 0.12, 0.03, 5};
      // the stated source (0.25, 0.5) lies on the cloak circle; moved just outside
      c.sources = {PointSource{{0.2, 0.5}}};
      c.k = 0.2;
      c.final_time = 0.05;
      c.steps = 180;
      c.boundary_points = 128;
      c.object_points = 128;
      c.report_times = {0.0125, 0.025, 0.05};
      c.chosen["source"] = "(0.2,0.5)";
      c.chosen["object"] = "kite center (0.5,0.5) scale 0.08";
      c.chosen["standin"] = "flower center (0.5,0.5) radius 0.12 amplitude 0.03 petals 5";
      c.chosen["object_points"] = "128";
      c.chosen["exact_lags"] = "8";
      c.chosen["report_times"] = "0.0125,0.025,0.05";
      c.chosen["buffer"] = "0.05";
      c.chosen["product_window"] = "0.005";
      return {c};
    }
    default:
      throw std::invalid_argument("no preset for figure " + std::to_string(figure));
  }
}

}  // namespace heatcloak
