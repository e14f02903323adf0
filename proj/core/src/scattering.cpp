#include "heatcloak/scattering.hpp"

#include <stdexcept>

namespace heatcloak {

LayerPotential ScatteringSolution::field() const { return LayerPotential(mesh, tg, k, -psi, -incident, 1.0); }

ScatteringSolution solve_dirichlet_density(std::shared_ptr<const BoundaryMesh> mesh, const SpaceTimeDensity& incident,
                                           const TimeGrid& tg, double k, const SpaceTimeDensity* half_term,
                                           int exact_lags) {
  if (!mesh) throw std::invalid_argument("solve_dirichlet_density: null mesh");
  if (incident.rows() != tg.M || incident.cols() != mesh->size()) {
    throw std::invalid_argument("solve_dirichlet_density: incident trace shape mismatch");
  }
  const SpaceTimeDensity& half = half_term ? *half_term : incident;
  if (half.rows() != incident.rows() || half.cols() != incident.cols()) {
    throw std::invalid_argument("solve_dirichlet_density: half-term shape mismatch");
  }
  ScatteringSolution sol;
  sol.mesh = mesh;
  sol.tg = tg;
  sol.k = k;
  sol.incident = incident;
  const BlockConvOperator V = exact_lags > 0
                                  ? assemble_operator_corrected(LayerKind::single, *mesh, tg, k, exact_lags)
                                  : assemble_operator(LayerKind::single, *mesh, tg, k);
  const BlockConvOperator K = exact_lags > 0
                                  ? assemble_operator_corrected(LayerKind::dipole, *mesh, tg, k, exact_lags)
                                  : assemble_operator(LayerKind::dipole, *mesh, tg, k);
  const SpaceTimeDensity rhs = 0.5 * half - apply_operator(K, incident);
  sol.psi = forward_block_solve(V, rhs, &sol.report);
  return sol;
}

ScatteringSolution solve_dirichlet_density(const DirichletInclusion& inclusion, const SpaceTimeDensity& incident,
                                           const TimeGrid& tg, double k) {
  auto mesh = std::make_shared<const BoundaryMesh>(discretize(inclusion.curve, inclusion.n_points));
  return solve_dirichlet_density(mesh, incident, tg, k);
}

std::vector<double> scattered_field(const ScatteringSolution& sol, const std::vector<Vec2>& targets, int j) {
  if (j < 0 || j > sol.tg.M) throw std::invalid_argument("scattered_field: step index out of range");
  for (const Vec2& x : targets)
    if (sol.mesh->curve->contains(x)) throw std::invalid_argument("scattered_field: target lies inside the inclusion");
  return sol.field().evaluate(targets, sol.tg.step_time(j));
}

}  // namespace heatcloak
