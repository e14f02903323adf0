#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "heatcloak/geometry.hpp"
#include "heatcloak/vec2.hpp"

namespace heatcloak {

/// Uniform time stepping. Density rows live at (r + 1/2) dt (r = 0..M-1, zero-based);
/// fields are reported at step ends j dt (j = 1..M).
struct TimeGrid {
  double dt = 0.0;
  int M = 0;

  TimeGrid() = default;
  TimeGrid(double dt_, int M_);
  /// M equal steps covering [0, T].
  static TimeGrid over(double T, int M);

  double density_time(int r) const { return (r + 0.5) * dt; }
  double step_time(int j) const { return j * dt; }
  double final_time() const { return M * dt; }
  /// Number of density rows strictly before time t.
  int rows_before(double t) const;
  /// Step index j with |j dt - t| tiny, or -1.
  int step_index(double t) const;
};

/// M x N table: rows are midpoint times, columns are mesh segments.
using SpaceTimeDensity = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class LayerKind { single, dipole };

/// Block-Toeplitz lower-triangular operator. blocks[i] holds the raw kernel at lag (i + 1/2) dt:
/// single: l_k K(x_j - x_k, lag); dipole: l_k dK/dn_y(x_j - x_k, lag).
/// Applying the operator multiplies by weight() = k dt, the midpoint quadrature weight of the
/// representation formula for u_t = k Laplacian u.
struct BlockConvOperator {
  LayerKind kind = LayerKind::single;
  std::vector<Eigen::MatrixXd> blocks;
  TimeGrid tg;
  double k = 1.0;

  int N() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].rows()); }
  int M() const { return static_cast<int>(blocks.size()); }
  double weight() const { return k * tg.dt; }
};

BlockConvOperator assemble_operator(LayerKind kind, const BoundaryMesh& mesh, const TimeGrid& tg, double k);

/// Row j of the result is weight * sum_{m <= j} blocks[j - m] * row_m. Blocked by lag (GEMM per lag).
SpaceTimeDensity apply_operator(const BlockConvOperator& op, const SpaceTimeDensity& density);
/// Plain triple loop; reference for apply_operator.
SpaceTimeDensity apply_operator_reference(const BlockConvOperator& op, const SpaceTimeDensity& density);

struct SolveReport {
  double condition = 0.0;  // estimate for the leading block
  double residual = 0.0;   // ||op psi - rhs||_inf / ||rhs||_inf
};

inline constexpr double kConditionLimit = 1e12;

/// Solves op * psi = rhs by causal block forward substitution (divide and conquer in time).
/// Throws IllConditionedOperator when the leading block's condition estimate exceeds 1e12.
SpaceTimeDensity forward_block_solve(const BlockConvOperator& op, const SpaceTimeDensity& rhs,
                                     SolveReport* report = nullptr);
/// Sequential row-by-row substitution; reference for forward_block_solve.
SpaceTimeDensity forward_block_solve_reference(const BlockConvOperator& op, const SpaceTimeDensity& rhs);

/// Spatial model used for the rows integrated exactly in time.
enum class NearGeometry {
  curve,     // exact parametric curve, densities linearly interpolated in the parameter
  polygon,   // mesh chords, piecewise-constant densities
  discrete,  // one point per segment (segment centers)
};

/// Options for the near-boundary evaluator.
struct NearOptions {
  int recent_rows = 8;     // rows handled by product integration
  int gauss_points = 16;   // per panel
  double panel_ratio = 0.25;
  int max_depth = 40;
  NearGeometry geometry = NearGeometry::curve;
};

/// k * int_{max(tau_lo,0)}^{tau_hi} int_{chord a->b} kernel(x - y, tau) dy dtau for the single layer
/// kernel K or the dipole kernel dK/dn_y with source normal n. Targets on the chord are handled
/// analytically (single) or by symmetry (dipole, taken as 0).
double chord_time_integral(LayerKind kind, Vec2 x, Vec2 a, Vec2 b, Vec2 n, double tau_lo, double tau_hi, double k,
                           const NearOptions& opt = {});

/// Operator whose first `exact_lags` blocks hold lag-interval time integrals of the kernel
/// integrated along each chord (divided by k dt so that weight() * block is the integral);
/// later blocks are the midpoint blocks of assemble_operator.
BlockConvOperator assemble_operator_corrected(LayerKind kind, const BoundaryMesh& mesh, const TimeGrid& tg, double k,
                                              int exact_lags, const NearOptions& opt = {});

/// Single and double layer potentials sharing one mesh and time grid:
///   u(x,t) = coef * k dt * sum_{rows before t} sum_s l_s [ sl[r,s] K(x - x_s, lag)
///                                                       + dl[r,s] dK/dn_y(x - x_s, lag) ]
/// with lag = t - (r + 1/2) dt. Either density may be empty.
///
/// With product_rows = L > 0 the L most recent rows use the exact time integral of the kernel
/// over their interval [r dt, (r + 1) dt] instead of the midpoint sample; this removes the
/// under-resolved young-lag error for targets within a few sqrt(k dt) of the boundary.
/// Gradients and histories always use the plain midpoint sum.
class LayerPotential {
 public:
  LayerPotential(std::shared_ptr<const BoundaryMesh> mesh, TimeGrid tg, double k, SpaceTimeDensity single,
                 SpaceTimeDensity dipole, double coef = 1.0);

  const BoundaryMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const BoundaryMesh>& mesh_ptr() const { return mesh_; }
  const TimeGrid& time_grid() const { return tg_; }
  double diffusivity() const { return k_; }
  double coef() const { return coef_; }
  const SpaceTimeDensity& single() const { return sl_; }
  const SpaceTimeDensity& dipole() const { return dl_; }
  LayerPotential scaled(double factor) const;
  int product_rows() const { return product_rows_; }
  LayerPotential with_product_rows(int rows) const;

  /// Field at one point. Throws if x coincides with a mesh center.
  double value(Vec2 x, double t) const;
  Vec2 gradient(Vec2 x, double t) const;
  /// Field at many points and one time; vectorized, parallel over targets.
  std::vector<double> evaluate(const std::vector<Vec2>& targets, double t) const;
  /// Adds coef * field into out (same length as targets).
  void accumulate(const std::vector<Vec2>& targets, double t, std::vector<double>& out) const;
  /// Field at many points and several step ends j dt (rows of the result follow `steps`).
  /// Shares one kernel table per target across all steps; same values as evaluate().
  Eigen::MatrixXd evaluate_steps(const std::vector<Vec2>& targets, const std::vector<int>& steps) const;

  /// Histories at every density time (midpoint = true) or every step end (midpoint = false).
  /// Result is M x targets. With target normals, also the normal derivative history.
  Eigen::MatrixXd history(const std::vector<Vec2>& targets, bool midpoint) const;
  Eigen::MatrixXd normal_derivative_history(const std::vector<Vec2>& targets, const std::vector<Vec2>& normals,
                                            bool midpoint) const;

  /// Value using product integration in time and adaptive quadrature on the exact curve for the
  /// most recent rows, with densities interpolated linearly in the curve parameter. Accurate
  /// close to (and on) the boundary.
  double value_near(Vec2 x, double t, const NearOptions& opt = {}) const;

 private:
  double plain_rows(Vec2 x, double t, int row_begin, int row_end) const;
  // Exact-in-time contribution of rows [R - L, R) with discrete space (no coef).
  double product_rows_sum(Vec2 x, double t, int R, int L) const;

  std::shared_ptr<const BoundaryMesh> mesh_;
  TimeGrid tg_;
  double k_;
  SpaceTimeDensity sl_;
  SpaceTimeDensity dl_;
  double coef_;
  int product_rows_ = 0;
};

/// Discrete single layer at step j: k dt sum_{m <= j} sum_s l_s density[m,s] K(x - x_s, (j - m + 1/2) dt).
std::vector<double> eval_single_layer(const BoundaryMesh& mesh, const SpaceTimeDensity& density,
                                      const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k);
/// Same with dK/dn_y attached to the source normal.
std::vector<double> eval_double_layer(const BoundaryMesh& mesh, const SpaceTimeDensity& density,
                                      const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k);

/// Double-layer kernel with the normal at the source point: K(z,t) (z . n) / (2kt), z = x - y.
double dipole_kernel(Vec2 z, Vec2 n_source, double t, double k);

}  // namespace heatcloak
