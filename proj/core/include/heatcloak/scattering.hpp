#pragma once

#include <memory>
#include <vector>

#include "heatcloak/geometry.hpp"
#include "heatcloak/layer_potentials.hpp"

namespace heatcloak {

/// Passive object with zero Dirichlet data on its boundary.
struct DirichletInclusion {
  CurvePtr curve;
  int n_points = 128;
};

/// Solution of V psi = u_i/2 + K(-u_i) on the inclusion mesh, with the scattered field
///   u_s = DL(-u_i) - SL(psi).
struct ScatteringSolution {
  std::shared_ptr<const BoundaryMesh> mesh;
  TimeGrid tg;
  double k = 1.0;
  SpaceTimeDensity incident;  // u_i at density times
  SpaceTimeDensity psi;
  SolveReport report;

  LayerPotential field() const;
};

/// incident: Dirichlet trace at density times (drives the dipole term).
/// half_term: samples used for u_i/2; defaults to the same trace.
/// exact_lags > 0 assembles both operators with assemble_operator_corrected.
ScatteringSolution solve_dirichlet_density(std::shared_ptr<const BoundaryMesh> mesh, const SpaceTimeDensity& incident,
                                           const TimeGrid& tg, double k,
                                           const SpaceTimeDensity* half_term = nullptr, int exact_lags = 0);

ScatteringSolution solve_dirichlet_density(const DirichletInclusion& inclusion, const SpaceTimeDensity& incident,
                                           const TimeGrid& tg, double k);

/// Scattered field at step j. Targets inside the inclusion are rejected.
std::vector<double> scattered_field(const ScatteringSolution& sol, const std::vector<Vec2>& targets, int j);

}  // namespace heatcloak
