#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatcloak/geometry.hpp"
#include "heatcloak/layer_potentials.hpp"
#include "heatcloak/reproduction.hpp"
#include "heatcloak/scattering.hpp"

namespace heatcloak {

enum class ScenarioKind {
  reproduce_interior,
  reproduce_exterior,
  cloak_source,
  cloak_object,
  mimic_source,
  mimic_object,
  harmonic_identity,
};

std::string to_string(ScenarioKind kind);
/// Throws std::invalid_argument on an unknown name.
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Polynomial sum a_ij x^i y^j of total degree <= 3.
struct Polynomial2 {
  std::map<std::pair<int, int>, double> coeffs;

  double value(Vec2 p) const;
  Vec2 gradient(Vec2 p) const;
  /// Catalog names: "1", "x", "y", "x2-y2", "xy", "x3-3xy2", "3x2y-y3".
  static Polynomial2 named(const std::string& name);
  /// Five-point Laplacian relative to the polynomial's scale at a few probe points.
  bool is_harmonic(double tol = 1e-8) const;
};

struct GridSpec {
  BBox box{0.0, 0.0, 1.0, 1.0};
  int nx = 200;
  int ny = 200;
};

struct NoiseSpec {
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::reproduce_interior;
  std::string name = "scenario";
  Shape cloak = Circle{{0.5, 0.5}, 0.25};  // Omega
  std::optional<Shape> object;             // R
  std::optional<Shape> standin;            // S (mimic_object)
  std::vector<PointSource> sources;        // field to reproduce, cloak or mimic (f)
  std::vector<PointSource> mimic_sources;  // g (mimic_source)
  double k = 0.3;
  double final_time = 0.2;
  int steps = 200;
  int boundary_points = 128;
  int object_points = 128;
  GridSpec grid;
  std::vector<double> report_times;  // empty: final time only
  NoiseSpec noise;
  double buffer = 0.05;  // Omega_{-s}, Omega_{+s} scale
  // Exact-in-time window for the most recent rows, in units of diameter^2 / k. 0: midpoint rule.
  double product_window = 0.005;
  // Lags integrated exactly in the scattering operators. 0: midpoint blocks.
  int exact_lags = 8;
  // Outward offset of the stand-in trace points on the cloak boundary, in cloak diameters.
  double trace_offset = 1e-3;
  // harmonic_identity
  std::string polynomial = "x";
  std::vector<Vec2> sample_points;  // empty: default ring of 10 points
  bool write_fields = true;
  bool heatmaps = true;
  double log_lo = -8.0;
  double log_hi = 0.0;
  // Parameters not fixed by the experiment description, recorded in result metadata.
  std::map<std::string, std::string> chosen;

  TimeGrid time_grid() const { return TimeGrid::over(final_time, steps); }
  /// Step indices of report_times (or {steps}). Throws ConfigError if a time is off the grid.
  std::vector<int> report_steps() const;
  /// Numeric ranges and geometric containment for the kind. Throws ConfigError.
  void validate() const;
};

/// Column-named metric table; the first column is usually time.
struct MetricTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  double at(size_t row, const std::string& column) const;
  std::vector<double> column(const std::string& column) const;
};

/// Sum of point sources and layer potentials. Targets inside any excluded curve give NaN.
struct ComposedField {
  std::vector<PointSource> sources;
  std::vector<LayerPotential> layers;
  std::vector<CurvePtr> excluded;
  double k = 1.0;

  double value(Vec2 x, double t) const;
  /// rows follow steps
  Eigen::MatrixXd evaluate_steps(const std::vector<Vec2>& targets, const std::vector<int>& steps,
                                 const TimeGrid& tg) const;
  std::vector<FieldGrid> grids(const FieldGrid& shape, const std::vector<int>& steps, const TimeGrid& tg) const;
};

struct ScenarioResult {
  std::string name;
  ScenarioKind kind = ScenarioKind::reproduce_interior;
  std::map<std::string, std::vector<FieldGrid>> fields;  // one grid per report step
  std::vector<int> steps;
  MetricTable metrics;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> warnings;
  // Curves that split the grid (used by residual checks to skip nearby cells).
  std::vector<CurvePtr> curves;
  TimeGrid tg;
  double k = 1.0;
  // Field name -> evaluator that produced it (absent for derived fields such as errors).
  std::map<std::string, ComposedField> evaluators;
};

/// Discrete heat-equation residual |u_t - k Laplacian u| of an evaluator at grid cells, with
/// fourth-order centered differences of spacing h in space and dt_fd in time. Cells closer than
/// min_cells cells to any curve, or closer than 2 h to the grid edge, are skipped; every
/// stride-th eligible cell in each direction is checked.
struct ResidualCheck {
  double max_residual = 0.0;
  double max_abs = 0.0;  // max |u| over the checked cells
  double ratio = 0.0;    // max_residual / max_abs (0 when the field vanishes)
  int cells = 0;
};
ResidualCheck grid_heat_residual(const ComposedField& field, const FieldGrid& grid, const std::vector<CurvePtr>& curves,
                                 double h, double dt_fd, int min_cells = 2, int stride = 1);

/// Rows of the exact-in-time window for a curve of the given diameter.
int product_window_rows(double window, double diameter, double k, const TimeGrid& tg);

ScenarioResult run_reproduce_interior(const ScenarioConfig& cfg);
ScenarioResult run_reproduce_exterior(const ScenarioConfig& cfg);
ScenarioResult run_cloak_source(const ScenarioConfig& cfg);
ScenarioResult run_cloak_object(const ScenarioConfig& cfg);
ScenarioResult run_mimic_source(const ScenarioConfig& cfg);
ScenarioResult run_mimic_object(const ScenarioConfig& cfg);
ScenarioResult run_harmonic_identity(const ScenarioConfig& cfg);
/// Dispatches on cfg.kind after validate().
ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct HarmonicCheck {
  Vec2 x;
  double volume = 0.0;    // int_Omega f(y) K(x - y, t) dy
  double boundary = 0.0;  // boundary form with phi and d phi / dn
};

/// Both sides of the harmonic initial-condition identity at each point. The curve must be
/// star-shaped about its centroid. Throws std::invalid_argument for a non-harmonic f.
std::vector<HarmonicCheck> verify_harmonic_identity(const Polynomial2& f, const ClosedCurve& curve, double t,
                                                    double k, const std::vector<Vec2>& points);

/// Reproducible experiment presets: 3, 4, 7, 8, 9, 10, 11, 12. Figures 7 and 8 return one
/// config per discretization level and problem; figure 9 returns the interior and exterior runs.
std::vector<ScenarioConfig> figure_preset(int figure);
std::vector<int> figure_numbers();

}  // namespace heatcloak
