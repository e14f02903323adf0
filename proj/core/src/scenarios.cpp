#include "heatcloak/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "heatcloak/error.hpp"
#include "heatcloak/heat_kernel.hpp"

namespace heatcloak {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

CurvePtr checked_curve(const Shape& shape, const char* what) {
  try {
    return make_curve(shape);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what(), 0, std::string("geometry.") + what);
  }
}

TracePair sum_traces(const std::vector<PointSource>& sources, const BoundaryMesh& mesh, const TimeGrid& tg, double k) {
  TracePair t{SpaceTimeDensity::Zero(tg.M, mesh.size()), SpaceTimeDensity::Zero(tg.M, mesh.size())};
  for (const auto& s : sources) t = t + point_source_traces(s, mesh, tg, k);
  return t;
}

TracePair maybe_perturb(const TracePair& t, const NoiseSpec& noise) {
  if (!(noise.fraction > 0.0)) return t;
  return {perturb_density(t.dirichlet, noise.fraction, noise.seed),
          perturb_density(t.neumann, noise.fraction, noise.seed + 1)};
}

// Sum of two composed fields (same k).
ComposedField operator+(ComposedField a, const ComposedField& b) {
  a.sources.insert(a.sources.end(), b.sources.begin(), b.sources.end());
  a.layers.insert(a.layers.end(), b.layers.begin(), b.layers.end());
  a.excluded.insert(a.excluded.end(), b.excluded.begin(), b.excluded.end());
  return a;
}

SpaceTimeDensity to_density(const Eigen::MatrixXd& m) { return SpaceTimeDensity(m); }

struct Context {
  const ScenarioConfig& cfg;
  TimeGrid tg;
  std::vector<int> steps;
  CurvePtr omega;
  std::shared_ptr<const BoundaryMesh> mesh;
  int window_rows = 0;
  FieldGrid shape;
  RegionMask inner;
  RegionMask outer;
  ScenarioResult result;
  std::chrono::steady_clock::time_point start;

  explicit Context(const ScenarioConfig& c) : cfg(c), start(std::chrono::steady_clock::now()) {
    c.validate();
    tg = c.time_grid();
    steps = c.report_steps();
    omega = make_curve(c.cloak);
    mesh = std::make_shared<const BoundaryMesh>(discretize(omega, c.boundary_points));
    window_rows = product_window_rows(c.product_window, omega->diameter(), c.k, tg);
    shape = uniform_grid(c.grid.box, c.grid.nx, c.grid.ny);
    shape.diffusivity = c.k;
    inner = region_mask(shape, *omega, -c.buffer);
    outer = region_mask(shape, *omega, c.buffer).complement();
    result.name = c.name;
    result.kind = c.kind;
    result.steps = steps;
    result.tg = tg;
    result.k = c.k;
    result.curves.push_back(omega);
    auto& md = result.metadata;
    md["kind"] = to_string(c.kind);
    md["cloak"] = describe(c.cloak);
    md["diffusivity"] = fmt(c.k);
    md["final_time"] = fmt(c.final_time);
    md["steps"] = std::to_string(c.steps);
    md["dt"] = fmt(tg.dt);
    md["boundary_points"] = std::to_string(c.boundary_points);
    md["grid"] = std::to_string(c.grid.nx) + "x" + std::to_string(c.grid.ny);
    md["buffer"] = fmt(c.buffer);
    md["product_window"] = fmt(c.product_window);
    md["product_rows"] = std::to_string(window_rows);
    md["growth_condition"] = "point sources (kernel translates satisfy the growth condition)";
    if (c.noise.fraction > 0.0) {
      md["noise_fraction"] = fmt(c.noise.fraction);
      md["noise_seed"] = std::to_string(c.noise.seed);
    }
    for (const auto& [key, value] : c.chosen) md["chosen." + key] = value;
  }

  void emit(const std::string& name, const ComposedField& f) {
    result.fields[name] = f.grids(shape, steps, tg);
    result.evaluators[name] = f;
  }

  // Sum of already emitted fields, without re-evaluating them.
  void emit_sum(const std::string& name, const std::vector<std::string>& parts) {
    ComposedField f = result.evaluators.at(parts.at(0));
    std::vector<FieldGrid> g = result.fields.at(parts[0]);
    for (size_t i = 1; i < parts.size(); ++i) {
      f = f + result.evaluators.at(parts[i]);
      const auto& h = result.fields.at(parts[i]);
      for (size_t p = 0; p < g.size(); ++p)
        for (size_t c = 0; c < g[p].values.size(); ++c) g[p].values[c] += h[p].values[c];
    }
    result.fields[name] = std::move(g);
    result.evaluators[name] = std::move(f);
  }

  std::vector<FieldGrid>& fields(const std::string& name) { return result.fields.at(name); }

  ComposedField field_of(std::vector<PointSource> sources) const {
    ComposedField f;
    f.sources = std::move(sources);
    f.k = cfg.k;
    return f;
  }
  ComposedField field_of(const LayerPotential& lp, std::vector<CurvePtr> excluded = {}) const {
    ComposedField f;
    f.layers.push_back(lp);
    f.excluded = std::move(excluded);
    f.k = cfg.k;
    return f;
  }

  ScenarioResult finish() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metadata["wall_time_s"] = fmt(secs);
    return std::move(result);
  }
};

void record_solve(ScenarioResult& r, const std::string& prefix, const ScatteringSolution& sol) {
  r.metadata[prefix + ".condition"] = fmt(sol.report.condition);
  r.metadata[prefix + ".residual"] = fmt(sol.report.residual);
}

std::vector<FieldGrid> difference_grids(const std::vector<FieldGrid>& a, const std::vector<FieldGrid>& b, bool absolute) {
  std::vector<FieldGrid> out = a;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t c = 0; c < a[i].values.size(); ++c) {
      const double d = a[i].values[c] - b[i].values[c];
      out[i].values[c] = absolute ? std::abs(d) : d;
    }
  return out;
}

double relative_l2(const FieldGrid& a, const FieldGrid& b, const RegionMask& mask) {
  const double den = masked_l2(b, mask);
  const double num = masked_l2_difference(a, b, mask);
  return den > 0.0 ? num / den : num;
}

ScenarioResult run_reproduce(const ScenarioConfig& cfg, ReproductionMode mode) {
  Context ctx(cfg);
  const bool interior = mode == ReproductionMode::interior;
  const TracePair traces = sum_traces(cfg.sources, *ctx.mesh, ctx.tg, cfg.k);
  auto build = [&](const TracePair& t) {
    const LayerPotential lp = interior ? interior_potential(t, ctx.mesh, ctx.tg, cfg.k)
                                       : exterior_potential(t, ctx.mesh, ctx.tg, cfg.k);
    return ctx.field_of(lp.with_product_rows(ctx.window_rows));
  };
  const ComposedField exact = ctx.field_of(cfg.sources);
  ctx.emit("computed", build(traces));
  ctx.emit("exact", exact);

  // expected field: the reference on the reproduction side of the curve, 0 on the other
  std::vector<FieldGrid> expected = ctx.fields("exact");
  for (auto& g : expected)
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        if (ctx.omega->contains(g.cell_center(ix, iy)) != interior) g.at(ix, iy) = 0.0;
  ctx.result.fields["error"] = difference_grids(ctx.fields("computed"), expected, true);

  const bool noisy = cfg.noise.fraction > 0.0;
  if (noisy) {
    ctx.emit("computed_noisy", build(maybe_perturb(traces, cfg.noise)));
    ctx.result.fields["error_noisy"] = difference_grids(ctx.fields("computed_noisy"), expected, true);
  }

  auto& m = ctx.result.metrics;
  m.columns = {"t", "relerr_minus", "err_plus", "err_minus", "relerr_plus"};
  if (noisy) {
    for (const char* c : {"noisy_relerr_minus", "noisy_err_plus", "noisy_err_minus", "noisy_relerr_plus"})
      m.columns.push_back(c);
  }
  for (size_t p = 0; p < ctx.steps.size(); ++p) {
    const FieldGrid& ref = ctx.fields("exact")[p];
    const auto e = reproduction_errors(ctx.fields("computed")[p], ref, ctx.inner, ctx.outer, mode);
    std::vector<double> row{ctx.tg.step_time(ctx.steps[p]), e.relerr_minus, e.err_plus, e.err_minus, e.relerr_plus};
    if (e.relative_was_absolute) ctx.result.warnings.push_back("relative error reported as absolute at t=" + fmt(row[0]));
    if (noisy) {
      const auto n = reproduction_errors(ctx.fields("computed_noisy")[p], ref, ctx.inner, ctx.outer, mode);
      row.insert(row.end(), {n.relerr_minus, n.err_plus, n.err_minus, n.relerr_plus});
    }
    m.rows.push_back(std::move(row));
  }
  return ctx.finish();
}

// Dirichlet trace at density times of a composed field on a mesh, via layer histories.
SpaceTimeDensity density_trace(const ComposedField& f, const BoundaryMesh& mesh, const TimeGrid& tg) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(tg.M, mesh.size());
  for (const auto& lp : f.layers) h += lp.history(mesh.centers, true);
  for (int r = 0; r < tg.M; ++r)
    for (int s = 0; s < mesh.size(); ++s)
      for (const auto& src : f.sources) h(r, s) += src.value(mesh.centers[s], tg.density_time(r), f.k);
  return to_density(h);
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::reproduce_interior: return "reproduce_interior";
    case ScenarioKind::reproduce_exterior: return "reproduce_exterior";
    case ScenarioKind::cloak_source: return "cloak_source";
    case ScenarioKind::cloak_object: return "cloak_object";
    case ScenarioKind::mimic_source: return "mimic_source";
    case ScenarioKind::mimic_object: return "mimic_object";
    case ScenarioKind::harmonic_identity: return "harmonic_identity";
  }
  return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  for (auto k : {ScenarioKind::reproduce_interior, ScenarioKind::reproduce_exterior, ScenarioKind::cloak_source,
                 ScenarioKind::cloak_object, ScenarioKind::mimic_source, ScenarioKind::mimic_object,
                 ScenarioKind::harmonic_identity}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

double Polynomial2::value(Vec2 p) const {
  double v = 0.0;
  for (const auto& [ij, a] : coeffs) v += a * std::pow(p.x, ij.first) * std::pow(p.y, ij.second);
  return v;
}

Vec2 Polynomial2::gradient(Vec2 p) const {
  Vec2 g;
  for (const auto& [ij, a] : coeffs) {
    const auto [i, j] = ij;
    if (i > 0) g.x += a * i * std::pow(p.x, i - 1) * std::pow(p.y, j);
    if (j > 0) g.y += a * j * std::pow(p.x, i) * std::pow(p.y, j - 1);
  }
  return g;
}

Polynomial2 Polynomial2::named(const std::string& name) {
  Polynomial2 p;
  if (name == "1") p.coeffs = {{{0, 0}, 1.0}};
  else if (name == "x") p.coeffs = {{{1, 0}, 1.0}};
  else if (name == "y") p.coeffs = {{{0, 1}, 1.0}};
  else if (name == "x2-y2") p.coeffs = {{{2, 0}, 1.0}, {{0, 2}, -1.0}};
  else if (name == "xy") p.coeffs = {{{1, 1}, 1.0}};
  else if (name == "x3-3xy2") p.coeffs = {{{3, 0}, 1.0}, {{1, 2}, -3.0}};
  else if (name == "3x2y-y3") p.coeffs = {{{2, 1}, 3.0}, {{0, 3}, -1.0}};
  else if (name == "x2+y2") p.coeffs = {{{2, 0}, 1.0}, {{0, 2}, 1.0}};  // non-harmonic, for rejection tests
  else throw std::invalid_argument("unknown polynomial '" + name + "'");
  return p;
}

bool Polynomial2::is_harmonic(double tol) const {
  const double h = 1e-2;
  double scale = 0.0;
  for (const auto& [ij, a] : coeffs) {
    if (ij.first < 0 || ij.second < 0 || ij.first + ij.second > 3) return false;
    scale = std::max(scale, std::abs(a));
  }
  if (scale == 0.0) return true;
  for (Vec2 p : {Vec2{0.3, -0.7}, Vec2{1.1, 0.4}, Vec2{-0.5, 0.9}}) {
    const double lap = (value({p.x + h, p.y}) + value({p.x - h, p.y}) + value({p.x, p.y + h}) +
                        value({p.x, p.y - h}) - 4.0 * value(p)) / (h * h);
    if (std::abs(lap) > tol * scale + 1e-6 * scale) return false;
  }
  return true;
}

std::vector<int> ScenarioConfig::report_steps() const {
  const TimeGrid tg = time_grid();
  if (report_times.empty()) return {steps};
  std::vector<int> out;
  for (double t : report_times) {
    const int j = tg.step_index(t);
    if (j < 1) throw ConfigError("report time " + fmt(t) + " is not a positive step end of the time grid", 0, "time.report");
    out.push_back(j);
  }
  return out;
}

void ScenarioConfig::validate() const {
  if (!(std::isfinite(k) && k > 0.0)) throw ConfigError("diffusivity must be positive", 0, "physics.diffusivity");
  if (!(std::isfinite(final_time) && final_time > 0.0)) throw ConfigError("final time must be positive", 0, "time.final");
  if (steps < 1) throw ConfigError("steps must be >= 1", 0, "time.steps");
  if (boundary_points < 8 || object_points < 8) throw ConfigError("boundary and object point counts must be >= 8", 0, boundary_points < 8 ? "geometry.boundary_points" : "geometry.object_points");
  if (grid.nx < 1 || grid.ny < 1) throw ConfigError("grid cell counts must be positive", 0, "grid.cells");
  if (!(grid.box.xmax > grid.box.xmin && grid.box.ymax > grid.box.ymin)) throw ConfigError("grid box is empty", 0, "grid.upper");
  if (!(buffer >= 0.0 && buffer < 1.0)) throw ConfigError("buffer must lie in [0, 1)", 0, "numerics.buffer");
  if (!(product_window >= 0.0)) throw ConfigError("product_window must be >= 0", 0, "numerics.product_window");
  if (exact_lags < 0) throw ConfigError("exact_lags must be >= 0", 0, "numerics.exact_lags");
  if (!(trace_offset > 0.0)) throw ConfigError("trace_offset must be positive", 0, "numerics.trace_offset");
  if (!(noise.fraction >= 0.0)) throw ConfigError("noise fraction must be >= 0", 0, "noise.fraction");
  if (!(log_lo < log_hi)) throw ConfigError("log range must be increasing", 0, "output.log_range");
  for (const auto& s : sources)
    if (!std::isfinite(s.strength) || !std::isfinite(s.location.x) || !std::isfinite(s.location.y))
      throw ConfigError("source values must be finite", 0, "sources.source");
  report_steps();

  const CurvePtr omega = checked_curve(cloak, "cloak");
  if (buffer != 0.0 && !omega->star_shaped()) {
    throw ConfigError("cloak curve must be star-shaped about its centroid", 0, "geometry.cloak");
  }
  const double eps = 1e-9 * omega->diameter();
  auto strictly_inside = [&](Vec2 p) { return omega->contains(p) && omega->distance(p) > eps; };
  auto strictly_outside = [&](Vec2 p) { return !omega->contains(p) && omega->distance(p) > eps; };
  auto require = [&](const std::vector<PointSource>& s, bool inside, const char* what, const char* key) {
    for (const auto& p : s) {
      if (inside ? !strictly_inside(p.location) : !strictly_outside(p.location)) {
        throw ConfigError(std::string(what) + " at (" + fmt(p.location.x) + ", " + fmt(p.location.y) + ") must lie " +
                              (inside ? "inside" : "outside") + " the cloak curve",
                          0, key);
      }
    }
  };
  auto require_object = [&](const std::optional<Shape>& s, const char* what) {
    const std::string key = std::string("geometry.") + what;
    if (!s) throw ConfigError(std::string(what) + " curve is required for " + to_string(kind), 0, key);
    const CurvePtr c = checked_curve(*s, what);
    if (!curve_inside(*c, *omega, eps)) throw ConfigError(std::string(what) + " curve must lie inside the cloak curve", 0, key);
    for (const auto& p : sources)
      if (c->contains(p.location)) throw ConfigError(std::string(what) + " curve must not contain a source", 0, key);
  };
  switch (kind) {
    case ScenarioKind::reproduce_interior:
      if (sources.empty()) throw ConfigError("reproduction needs at least one source", 0, "sources.source");
      require(sources, false, "source", "sources.source");
      break;
    case ScenarioKind::reproduce_exterior:
      if (sources.empty()) throw ConfigError("reproduction needs at least one source", 0, "sources.source");
      require(sources, true, "source", "sources.source");
      break;
    case ScenarioKind::cloak_source:
      require(sources, true, "source", "sources.source");
      break;
    case ScenarioKind::cloak_object:
      require(sources, false, "source", "sources.source");
      if (object) require_object(object, "object");
      break;
    case ScenarioKind::mimic_source:
      require(sources, true, "source", "sources.source");
      require(mimic_sources, true, "mimic source", "sources.mimic");
      break;
    case ScenarioKind::mimic_object:
      require(sources, false, "source", "sources.source");
      require_object(object, "object");
      require_object(standin, "standin");
      break;
    case ScenarioKind::harmonic_identity: {
      Polynomial2 p;
      try {
        p = Polynomial2::named(polynomial);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0, "harmonic.polynomial");
      }
      if (!p.is_harmonic()) throw ConfigError("polynomial '" + polynomial + "' is not harmonic", 0, "harmonic.polynomial");
      if (!omega->star_shaped()) throw ConfigError("harmonic identity needs a star-shaped curve", 0, "geometry.cloak");
      break;
    }
  }
}

double MetricTable::at(size_t row, const std::string& c) const {
  auto it = std::find(columns.begin(), columns.end(), c);
  if (it == columns.end()) throw std::out_of_range("metric column '" + c + "' not found");
  return rows.at(row).at(static_cast<size_t>(it - columns.begin()));
}

std::vector<double> MetricTable::column(const std::string& c) const {
  std::vector<double> out;
  for (size_t r = 0; r < rows.size(); ++r) out.push_back(at(r, c));
  return out;
}

double ComposedField::value(Vec2 x, double t) const {
  for (const auto& c : excluded)
    if (c->contains(x)) return kNaN;
  double v = 0.0;
  for (const auto& s : sources) v += s.value(x, t, k);
  for (const auto& lp : layers) v += lp.value(x, t);
  return v;
}

Eigen::MatrixXd ComposedField::evaluate_steps(const std::vector<Vec2>& targets, const std::vector<int>& steps,
                                              const TimeGrid& tg) const {
  const long n = static_cast<long>(targets.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(static_cast<long>(steps.size()), n, kNaN);
  std::vector<long> keep;
  std::vector<Vec2> live;
  for (long i = 0; i < n; ++i) {
    bool inside = false;
    for (const auto& c : excluded) inside = inside || c->contains(targets[i]);
    if (!inside) {
      keep.push_back(i);
      live.push_back(targets[i]);
    }
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(static_cast<long>(steps.size()), static_cast<long>(live.size()));
  for (const auto& lp : layers) acc += lp.evaluate_steps(live, steps);
  for (size_t p = 0; p < steps.size(); ++p) {
    const double t = tg.step_time(steps[p]);
    for (size_t i = 0; i < live.size(); ++i)
      for (const auto& s : sources) acc(static_cast<long>(p), static_cast<long>(i)) += s.value(live[i], t, k);
  }
  for (size_t i = 0; i < keep.size(); ++i) out.col(keep[i]) = acc.col(static_cast<long>(i));
  return out;
}

std::vector<FieldGrid> ComposedField::grids(const FieldGrid& shape, const std::vector<int>& steps,
                                            const TimeGrid& tg) const {
  const Eigen::MatrixXd v = evaluate_steps(shape.centers(), steps, tg);
  std::vector<FieldGrid> out(steps.size(), shape);
  for (size_t p = 0; p < steps.size(); ++p) {
    out[p].time = tg.step_time(steps[p]);
    out[p].diffusivity = k;
    for (size_t c = 0; c < shape.cell_count(); ++c) out[p].values[c] = v(static_cast<long>(p), static_cast<long>(c));
  }
  return out;
}

ResidualCheck grid_heat_residual(const ComposedField& field, const FieldGrid& grid, const std::vector<CurvePtr>& curves,
                                 double h, double dt_fd, int min_cells, int stride) {
  if (!(h > 0.0 && dt_fd > 0.0) || stride < 1) throw std::invalid_argument("grid_heat_residual: bad step sizes");
  const double t = grid.time;
  if (!(t - 2.0 * dt_fd > 0.0)) throw std::invalid_argument("grid_heat_residual: time stencil reaches t <= 0");
  const double clearance = min_cells * std::max(grid.dx, grid.dy);
  std::vector<Vec2> cells;
  for (int iy = 0; iy < grid.ny; iy += stride) {
    for (int ix = 0; ix < grid.nx; ix += stride) {
      const Vec2 x = grid.cell_center(ix, iy);
      bool ok = true;
      for (const auto& c : curves) ok = ok && c->distance(x) >= clearance;
      for (const auto& c : field.excluded) ok = ok && !c->contains(x);
      if (ok) cells.push_back(x);
    }
  }
  ResidualCheck out;
  out.cells = static_cast<int>(cells.size());
  if (cells.empty()) return out;
  // spatial stencil at t, then the four time-shifted centers
  const Vec2 offs[8] = {{h, 0}, {-h, 0}, {2 * h, 0}, {-2 * h, 0}, {0, h}, {0, -h}, {0, 2 * h}, {0, -2 * h}};
  std::vector<Vec2> pts;
  pts.reserve(cells.size() * 9);
  for (const Vec2& x : cells) {
    pts.push_back(x);
    for (const Vec2& o : offs) pts.push_back(x + o);
  }
  auto eval = [&](const std::vector<Vec2>& xs, double tt) {
    std::vector<double> v(xs.size(), 0.0);
    for (const auto& lp : field.layers) lp.accumulate(xs, tt, v);
    for (size_t i = 0; i < xs.size(); ++i)
      for (const auto& s : field.sources) v[i] += s.value(xs[i], tt, field.k);
    return v;
  };
  const std::vector<double> sp = eval(pts, t);
  const std::vector<double> tp2 = eval(cells, t + 2 * dt_fd), tp1 = eval(cells, t + dt_fd);
  const std::vector<double> tm1 = eval(cells, t - dt_fd), tm2 = eval(cells, t - 2 * dt_fd);
  for (size_t c = 0; c < cells.size(); ++c) {
    const double* u = &sp[c * 9];
    const double lap = (16.0 * (u[1] + u[2] + u[5] + u[6]) - (u[3] + u[4] + u[7] + u[8]) - 60.0 * u[0]) / (12.0 * h * h);
    const double ut = (-tp2[c] + 8.0 * tp1[c] - 8.0 * tm1[c] + tm2[c]) / (12.0 * dt_fd);
    out.max_residual = std::max(out.max_residual, std::abs(ut - field.k * lap));
    out.max_abs = std::max(out.max_abs, std::abs(u[0]));
  }
  out.ratio = out.max_abs > 0.0 ? out.max_residual / out.max_abs : 0.0;
  return out;
}

int product_window_rows(double window, double diameter, double k, const TimeGrid& tg) {
  if (!(window > 0.0)) return 0;
  const double rows = std::ceil(window * diameter * diameter / (k * tg.dt) - 1e-9);
  return static_cast<int>(std::min<double>(rows, tg.M));
}

ScenarioResult run_reproduce_interior(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::reproduce_interior) throw std::invalid_argument("config kind mismatch");
  return run_reproduce(cfg, ReproductionMode::interior);
}

ScenarioResult run_reproduce_exterior(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::reproduce_exterior) throw std::invalid_argument("config kind mismatch");
  return run_reproduce(cfg, ReproductionMode::exterior);
}

ScenarioResult run_cloak_source(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::cloak_source) throw std::invalid_argument("config kind mismatch");
  Context ctx(cfg);
  const TracePair traces = maybe_perturb(-sum_traces(cfg.sources, *ctx.mesh, ctx.tg, cfg.k), cfg.noise);
  const ComposedField incident = ctx.field_of(cfg.sources);
  const ComposedField cloaking =
      ctx.field_of(exterior_potential(traces, ctx.mesh, ctx.tg, cfg.k).with_product_rows(ctx.window_rows));
  ctx.emit("incident", incident);
  ctx.emit("cloaking", cloaking);
  ctx.emit_sum("total", {"incident", "cloaking"});
  auto& m = ctx.result.metrics;
  m.columns = {"t", "exterior_total_l2", "exterior_incident_l2", "exterior_ratio", "interior_relerr"};
  for (size_t p = 0; p < ctx.steps.size(); ++p) {
    const FieldGrid& tot = ctx.fields("total")[p];
    const FieldGrid& inc = ctx.fields("incident")[p];
    const double a = masked_l2(tot, ctx.outer), b = masked_l2(inc, ctx.outer);
    m.rows.push_back({tot.time, a, b, b > 0.0 ? a / b : kNaN, relative_l2(tot, inc, ctx.inner)});
  }
  return ctx.finish();
}

ScenarioResult run_cloak_object(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::cloak_object) throw std::invalid_argument("config kind mismatch");
  Context ctx(cfg);
  const TimeGrid& tg = ctx.tg;
  const TracePair traces = maybe_perturb(-sum_traces(cfg.sources, *ctx.mesh, tg, cfg.k), cfg.noise);
  const ComposedField incident = ctx.field_of(cfg.sources);
  const ComposedField cloaking =
      ctx.field_of(interior_potential(traces, ctx.mesh, tg, cfg.k).with_product_rows(ctx.window_rows));
  ctx.emit("incident", incident);
  ctx.emit("cloaking", cloaking);
  ctx.emit_sum("total_cloaked_no_object", {"incident", "cloaking"});
  auto& m = ctx.result.metrics;
  if (!cfg.object) {
    m.columns = {"t", "exterior_deviation_l2", "exterior_incident_l2"};
    for (size_t p = 0; p < ctx.steps.size(); ++p) {
      const FieldGrid& inc = ctx.fields("incident")[p];
      m.rows.push_back({inc.time, masked_l2(ctx.fields("cloaking")[p], ctx.outer), masked_l2(inc, ctx.outer)});
    }
    return ctx.finish();
  }
  const CurvePtr R = make_curve(*cfg.object);
  ctx.result.curves.push_back(R);
  ctx.result.metadata["object"] = describe(*cfg.object);
  ctx.result.metadata["object_points"] = std::to_string(cfg.object_points);
  ctx.result.metadata["exact_lags"] = std::to_string(cfg.exact_lags);
  auto rmesh = std::make_shared<const BoundaryMesh>(discretize(R, cfg.object_points));
  const int r_rows = product_window_rows(cfg.product_window, R->diameter(), cfg.k, tg);

  const SpaceTimeDensity ui_R = density_trace(incident, *rmesh, tg);
  const ScatteringSolution unc = solve_dirichlet_density(rmesh, ui_R, tg, cfg.k, nullptr, cfg.exact_lags);
  record_solve(ctx.result, "solve_uncloaked", unc);
  const SpaceTimeDensity drive = density_trace(incident + cloaking, *rmesh, tg);
  const ScatteringSolution clk = solve_dirichlet_density(rmesh, drive, tg, cfg.k, nullptr, cfg.exact_lags);
  record_solve(ctx.result, "solve_cloaked", clk);

  const ComposedField s_unc = ctx.field_of(unc.field().with_product_rows(r_rows), {R});
  const ComposedField s_clk = ctx.field_of(clk.field().with_product_rows(r_rows), {R});
  ctx.emit("scattered_uncloaked", s_unc);
  ctx.emit("scattered_cloaked", s_clk);
  ctx.emit_sum("cloaked_deviation", {"cloaking", "scattered_cloaked"});  // cloaked total minus incident
  ctx.emit_sum("total_uncloaked", {"incident", "scattered_uncloaked"});
  ctx.emit_sum("total_cloaked", {"incident", "cloaking", "scattered_cloaked"});
  m.columns = {"t", "scattered_uncloaked_l2", "scattered_cloaked_l2", "cloak_ratio", "cloaked_deviation_l2"};
  for (size_t p = 0; p < ctx.steps.size(); ++p) {
    const double a = masked_l2(ctx.fields("scattered_uncloaked")[p], ctx.outer);
    const double b = masked_l2(ctx.fields("scattered_cloaked")[p], ctx.outer);
    const double c = masked_l2(ctx.fields("cloaked_deviation")[p], ctx.outer);
    m.rows.push_back({tg.step_time(ctx.steps[p]), a, b, a > 0.0 ? b / a : kNaN, c});
  }
  return ctx.finish();
}

ScenarioResult run_mimic_source(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::mimic_source) throw std::invalid_argument("config kind mismatch");
  Context ctx(cfg);
  const TracePair tf = sum_traces(cfg.sources, *ctx.mesh, ctx.tg, cfg.k);
  const TracePair tg_ = sum_traces(cfg.mimic_sources, *ctx.mesh, ctx.tg, cfg.k);
  const TracePair traces = maybe_perturb(tg_ - tf, cfg.noise);
  const ComposedField vf = ctx.field_of(cfg.sources);
  const ComposedField vg = ctx.field_of(cfg.mimic_sources);
  const ComposedField cloaking =
      ctx.field_of(exterior_potential(traces, ctx.mesh, ctx.tg, cfg.k).with_product_rows(ctx.window_rows));
  ctx.emit("source_f", vf);
  ctx.emit("source_g", vg);
  ctx.emit("cloaking", cloaking);
  ctx.emit_sum("mimicked", {"source_f", "cloaking"});
  ctx.result.fields["mismatch"] = difference_grids(ctx.fields("mimicked"), ctx.fields("source_g"), true);
  auto& m = ctx.result.metrics;
  m.columns = {"t", "mismatch_rel", "mismatch_l2", "target_l2"};
  for (size_t p = 0; p < ctx.steps.size(); ++p) {
    const FieldGrid& a = ctx.fields("mimicked")[p];
    const FieldGrid& g = ctx.fields("source_g")[p];
    m.rows.push_back({a.time, relative_l2(a, g, ctx.outer), masked_l2_difference(a, g, ctx.outer),
                      masked_l2(g, ctx.outer)});
  }
  return ctx.finish();
}

ScenarioResult run_mimic_object(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::mimic_object) throw std::invalid_argument("config kind mismatch");
  Context ctx(cfg);
  const TimeGrid& tg = ctx.tg;
  const double k = cfg.k;
  const CurvePtr R = make_curve(*cfg.object);
  const CurvePtr S = make_curve(*cfg.standin);
  ctx.result.curves.push_back(R);
  ctx.result.curves.push_back(S);
  ctx.result.metadata["object"] = describe(*cfg.object);
  ctx.result.metadata["standin"] = describe(*cfg.standin);
  ctx.result.metadata["object_points"] = std::to_string(cfg.object_points);
  ctx.result.metadata["exact_lags"] = std::to_string(cfg.exact_lags);
  ctx.result.metadata["trace_offset"] = fmt(cfg.trace_offset);
  auto rmesh = std::make_shared<const BoundaryMesh>(discretize(R, cfg.object_points));
  auto smesh = std::make_shared<const BoundaryMesh>(discretize(S, cfg.object_points));
  const int r_rows = product_window_rows(cfg.product_window, R->diameter(), k, tg);
  const int s_rows = product_window_rows(cfg.product_window, S->diameter(), k, tg);

  const ComposedField incident = ctx.field_of(cfg.sources);
  const ScatteringSolution sol_r =
      solve_dirichlet_density(rmesh, density_trace(incident, *rmesh, tg), tg, k, nullptr, cfg.exact_lags);
  const ScatteringSolution sol_s =
      solve_dirichlet_density(smesh, density_trace(incident, *smesh, tg), tg, k, nullptr, cfg.exact_lags);
  record_solve(ctx.result, "solve_object", sol_r);
  record_solve(ctx.result, "solve_standin", sol_s);

  // stand-in scattered field traces on the cloak boundary, sampled just outside it
  const LayerPotential vs = sol_s.field();
  const double delta = cfg.trace_offset * ctx.omega->diameter();
  std::vector<Vec2> pts(ctx.mesh->centers.size());
  for (size_t s = 0; s < pts.size(); ++s) pts[s] = ctx.mesh->centers[s] + delta * ctx.mesh->normals[s];
  const TracePair vs_traces{to_density(vs.history(pts, true)),
                            to_density(vs.normal_derivative_history(pts, ctx.mesh->normals, true))};
  const TracePair ui_traces = sum_traces(cfg.sources, *ctx.mesh, tg, k);
  const TracePair noisy_ui = maybe_perturb(-ui_traces, cfg.noise);
  NoiseSpec second = cfg.noise;
  second.seed += 2;
  const TracePair noisy_vs = maybe_perturb(vs_traces, second);
  const ComposedField cloaking =
      ctx.field_of(interior_potential(noisy_ui, ctx.mesh, tg, k).with_product_rows(ctx.window_rows)) +
      ctx.field_of(exterior_potential(noisy_vs, ctx.mesh, tg, k).with_product_rows(ctx.window_rows));

  const ScatteringSolution sol_rc =
      solve_dirichlet_density(rmesh, density_trace(incident + cloaking, *rmesh, tg), tg, k, nullptr, cfg.exact_lags);
  record_solve(ctx.result, "solve_object_cloaked", sol_rc);

  const ComposedField s_r = ctx.field_of(sol_r.field().with_product_rows(r_rows), {R});
  const ComposedField s_s = ctx.field_of(vs.with_product_rows(s_rows), {S});
  const ComposedField s_rc = ctx.field_of(sol_rc.field().with_product_rows(r_rows), {R});
  ctx.emit("incident", incident);
  ctx.emit("cloaking", cloaking);
  ctx.emit("scattered_object", s_r);
  ctx.emit("scattered_standin", s_s);
  ctx.emit("object_scattered_mimicked", s_rc);
  ctx.emit_sum("scattered_mimicked", {"cloaking", "object_scattered_mimicked"});  // mimicked total minus incident
  ctx.emit_sum("total_object", {"incident", "scattered_object"});
  ctx.emit_sum("total_standin", {"incident", "scattered_standin"});
  ctx.emit_sum("total_mimicked", {"incident", "cloaking", "object_scattered_mimicked"});
  auto& m = ctx.result.metrics;
  m.columns = {"t", "mismatch_rel", "object_vs_standin_rel", "standin_scattered_l2"};
  for (size_t p = 0; p < ctx.steps.size(); ++p) {
    const FieldGrid& target = ctx.fields("scattered_standin")[p];
    m.rows.push_back({target.time, relative_l2(ctx.fields("scattered_mimicked")[p], target, ctx.outer),
                      relative_l2(ctx.fields("scattered_object")[p], target, ctx.outer), masked_l2(target, ctx.outer)});
  }
  return ctx.finish();
}

ScenarioResult run_harmonic_identity(const ScenarioConfig& cfg) {
  if (cfg.kind != ScenarioKind::harmonic_identity) throw std::invalid_argument("config kind mismatch");
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const CurvePtr omega = make_curve(cfg.cloak);
  std::vector<Vec2> pts = cfg.sample_points;
  if (pts.empty()) {
    const Vec2 c = omega->centroid();
    const double rad = 0.5 * omega->diameter();
    const double rho[5] = {0.0, 0.4, 0.8, 1.2, 1.8};
    for (int i = 0; i < 10; ++i) {
      const double a = 0.7 + 2.0 * kPi * i / 10.0;
      pts.push_back(c + rho[i % 5] * rad * Vec2{std::cos(a), std::sin(a)});
    }
  }
  ScenarioResult r;
  r.name = cfg.name;
  r.kind = cfg.kind;
  r.k = cfg.k;
  r.curves.push_back(omega);
  r.metadata["kind"] = to_string(cfg.kind);
  r.metadata["cloak"] = describe(cfg.cloak);
  r.metadata["polynomial"] = cfg.polynomial;
  r.metadata["time"] = fmt(cfg.final_time);
  r.metadata["diffusivity"] = fmt(cfg.k);
  for (const auto& [key, value] : cfg.chosen) r.metadata["chosen." + key] = value;
  const auto checks = verify_harmonic_identity(Polynomial2::named(cfg.polynomial), *omega, cfg.final_time, cfg.k, pts);
  r.metrics.columns = {"x", "y", "volume", "boundary", "abs_diff"};
  for (const auto& c : checks) r.metrics.rows.push_back({c.x.x, c.x.y, c.volume, c.boundary, std::abs(c.volume - c.boundary)});
  r.metadata["wall_time_s"] = fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return r;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case ScenarioKind::reproduce_interior: return run_reproduce_interior(cfg);
    case ScenarioKind::reproduce_exterior: return run_reproduce_exterior(cfg);
    case ScenarioKind::cloak_source: return run_cloak_source(cfg);
    case ScenarioKind::cloak_object: return run_cloak_object(cfg);
    case ScenarioKind::mimic_source: return run_mimic_source(cfg);
    case ScenarioKind::mimic_object: return run_mimic_object(cfg);
    case ScenarioKind::harmonic_identity: return run_harmonic_identity(cfg);
  }
  throw std::invalid_argument("unknown scenario kind");
}

}  // namespace heatcloak
