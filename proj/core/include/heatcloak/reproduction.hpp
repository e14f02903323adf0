#pragma once

#include <cstdint>
#include <vector>

#include "heatcloak/geometry.hpp"
#include "heatcloak/layer_potentials.hpp"

namespace heatcloak {

/// Dirichlet and Neumann traces of a field on a mesh, sampled at density times.
struct TracePair {
  SpaceTimeDensity dirichlet;
  SpaceTimeDensity neumann;

  TracePair operator-() const { return {-dirichlet, -neumann}; }
  TracePair operator+(const TracePair& o) const;
  TracePair operator-(const TracePair& o) const;
  TracePair scaled(double s) const { return {s * dirichlet, s * neumann}; }
};

/// Instantaneous point source at time 0.
struct PointSource {
  Vec2 location;
  double strength = 1.0;

  double value(Vec2 x, double t, double k) const;
  Vec2 gradient(Vec2 x, double t, double k) const;
};

TracePair point_source_traces(const PointSource& src, const BoundaryMesh& mesh, const TimeGrid& tg, double k);
std::vector<double> point_source_field(const PointSource& src, const std::vector<Vec2>& targets, double t, double k);

/// u = SL(du/dn) - DL(u): reproduces u inside the mesh curve and 0 outside.
LayerPotential interior_potential(const TracePair& traces, std::shared_ptr<const BoundaryMesh> mesh,
                                  const TimeGrid& tg, double k);
/// v = DL(v) - SL(dv/dn): reproduces v outside and 0 inside.
LayerPotential exterior_potential(const TracePair& traces, std::shared_ptr<const BoundaryMesh> mesh,
                                  const TimeGrid& tg, double k);

/// Values at step j. Targets on the curve (within 1e-12 diameters) are rejected.
std::vector<double> interior_reproduce(const TracePair& traces, const BoundaryMesh& mesh,
                                       const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k);
std::vector<double> exterior_reproduce(const TracePair& traces, const BoundaryMesh& mesh,
                                       const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k);

enum class ReproductionMode { interior, exterior };

/// L2 errors by Riemann sum. The reference holds the full field; in interior mode the expected
/// field is the reference on `inner` and 0 on `outer`, and the other way round in exterior mode.
/// Inapplicable entries are NaN. A relative error whose reference norm is below 1e-14 is
/// reported as absolute and flagged; an exactly zero reference norm throws.
struct ReproductionErrors {
  double relerr_minus = NAN;
  double err_plus = NAN;
  double err_minus = NAN;
  double relerr_plus = NAN;
  bool relative_was_absolute = false;
};

ReproductionErrors reproduction_errors(const FieldGrid& field, const FieldGrid& reference, const RegionMask& inner,
                                       const RegionMask& outer, ReproductionMode mode);

/// sqrt(dx dy sum v^2) over masked cells.
double masked_l2(const FieldGrid& grid, const RegionMask& mask);
double masked_l2_difference(const FieldGrid& a, const FieldGrid& b, const RegionMask& mask);

/// Adds to each row an independent N(0, (fraction * ||row||_2)^2) vector. Deterministic per seed
/// (mt19937_64 with std::normal_distribution).
SpaceTimeDensity perturb_density(const SpaceTimeDensity& density, double fraction, std::uint64_t seed);

/// Arg-max of |values| over masked cells across a sequence of grids.
struct MaxLocation {
  int snapshot = -1;
  int ix = -1;
  int iy = -1;
  double value = 0.0;
};
MaxLocation locate_max(const std::vector<FieldGrid>& grids, const RegionMask& mask);

/// Distance in cells from each masked cell to the nearest unmasked cell (Chebyshev metric).
/// Unmasked cells get 0. Cells are treated as unbounded at the grid edge when edge_is_boundary
/// is false.
std::vector<int> cell_distance_to_boundary(const RegionMask& mask, bool edge_is_boundary);

}  // namespace heatcloak
