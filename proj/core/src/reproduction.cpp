#include "heatcloak/reproduction.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "heatcloak/heat_kernel.hpp"

namespace heatcloak {

TracePair TracePair::operator+(const TracePair& o) const { return {dirichlet + o.dirichlet, neumann + o.neumann}; }
TracePair TracePair::operator-(const TracePair& o) const { return {dirichlet - o.dirichlet, neumann - o.neumann}; }

double PointSource::value(Vec2 x, double t, double k) const {
  return strength * kernel_value_r2(norm2(x - location), t, k);
}

Vec2 PointSource::gradient(Vec2 x, double t, double k) const {
  return strength * kernel_gradient(x - location, t, k);
}

TracePair point_source_traces(const PointSource& src, const BoundaryMesh& mesh, const TimeGrid& tg, double k) {
  const Diffusivity kk(k);
  const int N = mesh.size();
  for (const Vec2& c : mesh.centers)
    if (norm2(c - src.location) == 0.0) throw std::invalid_argument("point source lies on a mesh center");
  TracePair tp{SpaceTimeDensity(tg.M, N), SpaceTimeDensity(tg.M, N)};
  for (int r = 0; r < tg.M; ++r) {
    const double t = tg.density_time(r);
    for (int s = 0; s < N; ++s) {
      tp.dirichlet(r, s) = src.value(mesh.centers[s], t, k);
      tp.neumann(r, s) = dot(src.gradient(mesh.centers[s], t, k), mesh.normals[s]);
    }
  }
  return tp;
}

std::vector<double> point_source_field(const PointSource& src, const std::vector<Vec2>& targets, double t, double k) {
  const Diffusivity kk(k);
  std::vector<double> out(targets.size());
  for (size_t i = 0; i < targets.size(); ++i) out[i] = src.value(targets[i], t, k);
  return out;
}

LayerPotential interior_potential(const TracePair& traces, std::shared_ptr<const BoundaryMesh> mesh,
                                  const TimeGrid& tg, double k) {
  if (traces.dirichlet.rows() != traces.neumann.rows() || traces.dirichlet.cols() != traces.neumann.cols()) {
    throw std::invalid_argument("trace pair shapes differ");
  }
  return LayerPotential(std::move(mesh), tg, k, traces.neumann, -traces.dirichlet, 1.0);
}

LayerPotential exterior_potential(const TracePair& traces, std::shared_ptr<const BoundaryMesh> mesh,
                                  const TimeGrid& tg, double k) {
  return interior_potential(traces, std::move(mesh), tg, k).scaled(-1.0);
}

namespace {

void reject_on_curve(const BoundaryMesh& mesh, const std::vector<Vec2>& targets) {
  const double tol = 1e-12 * mesh.curve->diameter();
  for (const Vec2& x : targets) {
    bool near = false;
    for (const Vec2& c : mesh.centers) near = near || norm(x - c) <= tol;
    for (const Vec2& c : mesh.nodes) near = near || norm(x - c) <= tol;
    if (near || mesh.curve->distance(x) <= tol) {
      throw std::invalid_argument("representation formula is undefined on the boundary");
    }
  }
}

std::vector<double> reproduce(const TracePair& traces, const BoundaryMesh& mesh, const std::vector<Vec2>& targets,
                              const TimeGrid& tg, int j, double k, double sign) {
  if (j < 0 || j > tg.M) throw std::invalid_argument("reproduce: step index out of range");
  reject_on_curve(mesh, targets);
  auto m = std::make_shared<const BoundaryMesh>(mesh);
  return interior_potential(traces, m, tg, k).scaled(sign).evaluate(targets, tg.step_time(j));
}

}  // namespace

std::vector<double> interior_reproduce(const TracePair& traces, const BoundaryMesh& mesh,
                                       const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k) {
  return reproduce(traces, mesh, targets, tg, j, k, 1.0);
}

std::vector<double> exterior_reproduce(const TracePair& traces, const BoundaryMesh& mesh,
                                       const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k) {
  return reproduce(traces, mesh, targets, tg, j, k, -1.0);
}

double masked_l2(const FieldGrid& grid, const RegionMask& mask) {
  if (mask.nx != grid.nx || mask.ny != grid.ny) throw std::invalid_argument("masked_l2: mask shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < grid.values.size(); ++i)
    if (mask.inside[i]) s += grid.values[i] * grid.values[i];
  return std::sqrt(grid.dx * grid.dy * s);
}

double masked_l2_difference(const FieldGrid& a, const FieldGrid& b, const RegionMask& mask) {
  if (!a.same_geometry(b)) throw std::invalid_argument("masked_l2_difference: grid geometry mismatch");
  if (mask.nx != a.nx || mask.ny != a.ny) throw std::invalid_argument("masked_l2_difference: mask shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    if (mask.inside[i]) {
      const double d = a.values[i] - b.values[i];
      s += d * d;
    }
  return std::sqrt(a.dx * a.dy * s);
}

ReproductionErrors reproduction_errors(const FieldGrid& field, const FieldGrid& reference, const RegionMask& inner,
                                       const RegionMask& outer, ReproductionMode mode) {
  if (!field.same_geometry(reference)) throw std::invalid_argument("reproduction_errors: grid geometry mismatch");
  ReproductionErrors e;
  auto relative = [&](const RegionMask& m) {
    const double num = masked_l2_difference(field, reference, m);
    const double den = masked_l2(reference, m);
    if (den == 0.0) throw std::domain_error("reproduction_errors: reference norm is zero on the region");
    if (den < 1e-14) {
      e.relative_was_absolute = true;
      return num;
    }
    return num / den;
  };
  if (mode == ReproductionMode::interior) {
    e.relerr_minus = relative(inner);
    e.err_plus = masked_l2(field, outer);
  } else {
    e.relerr_plus = relative(outer);
    e.err_minus = masked_l2(field, inner);
  }
  return e;
}

SpaceTimeDensity perturb_density(const SpaceTimeDensity& density, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0)) throw std::invalid_argument("perturb_density: fraction must be nonnegative");
  SpaceTimeDensity out = density;
  if (fraction == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < out.rows(); ++r) {
    const double sd = fraction * density.row(r).norm();
    for (int c = 0; c < out.cols(); ++c) out(r, c) += sd * normal(rng);
  }
  return out;
}

MaxLocation locate_max(const std::vector<FieldGrid>& grids, const RegionMask& mask) {
  MaxLocation best;
  for (size_t g = 0; g < grids.size(); ++g) {
    const FieldGrid& f = grids[g];
    if (mask.nx != f.nx || mask.ny != f.ny) throw std::invalid_argument("locate_max: mask shape mismatch");
    for (int iy = 0; iy < f.ny; ++iy)
      for (int ix = 0; ix < f.nx; ++ix) {
        if (!mask.at(ix, iy)) continue;
        const double v = std::abs(f.at(ix, iy));
        if (best.snapshot < 0 || v > best.value) best = {static_cast<int>(g), ix, iy, v};
      }
  }
  return best;
}

std::vector<int> cell_distance_to_boundary(const RegionMask& mask, bool edge_is_boundary) {
  const int nx = mask.nx, ny = mask.ny;
  std::vector<int> dist(static_cast<size_t>(nx) * ny, 0);
  const int big = nx + ny;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (!mask.at(ix, iy)) continue;
      int best = big;
      if (edge_is_boundary) best = std::min({ix + 1, iy + 1, nx - ix, ny - iy});
      for (int jy = 0; jy < ny; ++jy)
        for (int jx = 0; jx < nx; ++jx) {
          if (mask.at(jx, jy)) continue;
          best = std::min(best, std::max(std::abs(jx - ix), std::abs(jy - iy)));
        }
      dist[static_cast<size_t>(iy) * nx + ix] = best;
    }
  return dist;
}

}  // namespace heatcloak
