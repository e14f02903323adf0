#include "heatcloak/layer_potentials.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "heatcloak/error.hpp"
#include "heatcloak/heat_kernel.hpp"
#include "heatcloak/quadrature.hpp"

namespace heatcloak {

namespace {

constexpr int kDirectSolveRows = 24;

using ArrayCol = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic>;

void check_shape(const SpaceTimeDensity& d, int M, int N, const char* what) {
  if (d.rows() != M || d.cols() != N) {
    throw std::invalid_argument(std::string(what) + ": density shape " + std::to_string(d.rows()) + "x" +
                                std::to_string(d.cols()) + " does not match " + std::to_string(M) + "x" +
                                std::to_string(N));
  }
}

// Periodic linear interpolation of a row sampled at theta_s = h (s + 1/2).
double interpolate_row(const SpaceTimeDensity& d, int row, double theta, int N) {
  const double h = 2.0 * kPi / N;
  double u = theta / h - 0.5;
  const double fl = std::floor(u);
  const double f = u - fl;
  int i = static_cast<int>(fl) % N;
  if (i < 0) i += N;
  const int i1 = (i + 1) % N;
  return (1.0 - f) * d(row, i) + f * d(row, i1);
}

}  // namespace

TimeGrid::TimeGrid(double dt_, int M_) : dt(dt_), M(M_) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (M < 1) throw std::invalid_argument("TimeGrid: need at least one step");
}

TimeGrid TimeGrid::over(double T, int M) {
  if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: final time must be positive");
  if (M < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  return TimeGrid(T / M, M);
}

int TimeGrid::rows_before(double t) const {
  const double u = t / dt - 0.5;
  if (u <= 0.0) return 0;
  const double c = std::ceil(u - 1e-9);
  return static_cast<int>(std::min<double>(c, M));
}

int TimeGrid::step_index(double t) const {
  const double j = std::round(t / dt);
  return std::abs(j * dt - t) <= 1e-9 * dt ? static_cast<int>(j) : -1;
}

double dipole_kernel(Vec2 z, Vec2 n_source, double t, double k) {
  if (!(t > 0.0)) return 0.0;
  return kernel_value_r2(norm2(z), t, k) * dot(z, n_source) / (2.0 * k * t);
}

BlockConvOperator assemble_operator(LayerKind kind, const BoundaryMesh& mesh, const TimeGrid& tg, double k) {
  const Diffusivity kk(k);
  const int N = mesh.size();
  if (N < 8) throw std::invalid_argument("assemble_operator: mesh needs N >= 8");
  BlockConvOperator op;
  op.kind = kind;
  op.tg = tg;
  op.k = kk;
  op.blocks.assign(tg.M, Eigen::MatrixXd(N, N));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < tg.M; ++i) {
    const double lag = (i + 0.5) * tg.dt;
    Eigen::MatrixXd& B = op.blocks[i];
    for (int c = 0; c < N; ++c) {
      for (int r = 0; r < N; ++r) {
        const Vec2 z = mesh.centers[r] - mesh.centers[c];
        const double kv = kernel_value_r2(norm2(z), lag, k);
        B(r, c) = kind == LayerKind::single ? mesh.lengths[c] * kv
                                            : mesh.lengths[c] * kv * dot(z, mesh.normals[c]) / (2.0 * k * lag);
      }
    }
  }
  return op;
}

SpaceTimeDensity apply_operator(const BlockConvOperator& op, const SpaceTimeDensity& density) {
  const int M = op.M(), N = op.N();
  check_shape(density, M, N, "apply_operator");
  SpaceTimeDensity out = SpaceTimeDensity::Zero(M, N);
  for (int d = 0; d < M; ++d) {
    out.middleRows(d, M - d).noalias() += density.topRows(M - d) * op.blocks[d].transpose();
  }
  out *= op.weight();
  return out;
}

SpaceTimeDensity apply_operator_reference(const BlockConvOperator& op, const SpaceTimeDensity& density) {
  const int M = op.M(), N = op.N();
  check_shape(density, M, N, "apply_operator_reference");
  SpaceTimeDensity out = SpaceTimeDensity::Zero(M, N);
  for (int j = 0; j < M; ++j)
    for (int m = 0; m <= j; ++m) {
      const Eigen::MatrixXd& B = op.blocks[j - m];
      for (int r = 0; r < N; ++r) {
        double s = 0.0;
        for (int c = 0; c < N; ++c) s += B(r, c) * density(m, c);
        out(j, r) += s;
      }
    }
  return out * op.weight();
}

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> leading_lu(const BlockConvOperator& op, double* condition) {
  if (op.M() < 1) throw std::invalid_argument("forward_block_solve: empty operator");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.weight() * op.blocks[0]);
  const double rc = lu.rcond();
  const double cond = rc > 0.0 ? 1.0 / rc : INFINITY;
  if (condition) *condition = cond;
  if (!std::isfinite(cond) || cond > kConditionLimit) {
    throw IllConditionedOperator("leading block is ill-conditioned (condition estimate " + std::to_string(cond) +
                                     " exceeds 1e12); use a finer time discretization",
                                 cond);
  }
  return lu;
}

double relative_residual(const BlockConvOperator& op, const SpaceTimeDensity& psi, const SpaceTimeDensity& rhs) {
  const double scale = rhs.cwiseAbs().maxCoeff();
  const double res = (apply_operator(op, psi) - rhs).cwiseAbs().maxCoeff();
  return scale > 0.0 ? res / scale : res;
}

}  // namespace

SpaceTimeDensity forward_block_solve(const BlockConvOperator& op, const SpaceTimeDensity& rhs, SolveReport* report) {
  const int M = op.M(), N = op.N();
  check_shape(rhs, M, N, "forward_block_solve");
  double cond = 0.0;
  const auto lu = leading_lu(op, &cond);
  const double w = op.weight();

  // Rows below the current block hold solved values; rows at or above hold reduced right-hand sides.
  SpaceTimeDensity X = rhs;
  std::function<void(int, int)> solve = [&](int lo, int hi) {
    if (hi - lo <= kDirectSolveRows) {
      for (int j = lo; j < hi; ++j) {
        const Eigen::VectorXd row = lu.solve(X.row(j).transpose());
        X.row(j) = row.transpose();
        for (int jj = j + 1; jj < hi; ++jj) X.row(jj).noalias() -= w * (op.blocks[jj - j] * row).transpose();
      }
      return;
    }
    const int mid = lo + (hi - lo) / 2;
    solve(lo, mid);
    for (int d = 1; d < hi - lo; ++d) {
      const int j0 = std::max(mid, lo + d);
      const int j1 = std::min(hi, mid + d);
      if (j1 <= j0) continue;
      X.middleRows(j0, j1 - j0).noalias() -= w * X.middleRows(j0 - d, j1 - j0) * op.blocks[d].transpose();
    }
    solve(mid, hi);
  };
  solve(0, M);
  if (report) {
    report->condition = cond;
    report->residual = relative_residual(op, X, rhs);
  }
  return X;
}

SpaceTimeDensity forward_block_solve_reference(const BlockConvOperator& op, const SpaceTimeDensity& rhs) {
  const int M = op.M(), N = op.N();
  check_shape(rhs, M, N, "forward_block_solve_reference");
  const auto lu = leading_lu(op, nullptr);
  const double w = op.weight();
  SpaceTimeDensity X(M, N);
  for (int j = 0; j < M; ++j) {
    Eigen::VectorXd r = rhs.row(j).transpose();
    for (int m = 0; m < j; ++m) r -= w * op.blocks[j - m] * X.row(m).transpose();
    X.row(j) = lu.solve(r).transpose();
  }
  return X;
}

LayerPotential::LayerPotential(std::shared_ptr<const BoundaryMesh> mesh, TimeGrid tg, double k,
                               SpaceTimeDensity single, SpaceTimeDensity dipole, double coef)
    : mesh_(std::move(mesh)), tg_(tg), k_(Diffusivity(k)), sl_(std::move(single)), dl_(std::move(dipole)),
      coef_(coef) {
  if (!mesh_) throw std::invalid_argument("LayerPotential: null mesh");
  if (sl_.size() > 0) check_shape(sl_, tg_.M, mesh_->size(), "LayerPotential single");
  if (dl_.size() > 0) check_shape(dl_, tg_.M, mesh_->size(), "LayerPotential dipole");
}

LayerPotential LayerPotential::with_product_rows(int rows) const {
  if (rows < 0) throw std::invalid_argument("LayerPotential: product_rows must be nonnegative");
  LayerPotential c = *this;
  c.product_rows_ = rows;
  return c;
}

constexpr double kNegligibleExponent = 50.0;

double LayerPotential::product_rows_sum(Vec2 x, double t, int R, int L) const {
  const int N = mesh_->size();
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  const double c = 1.0 / (4.0 * k_);
  double out = 0.0;
  for (int s = 0; s < N; ++s) {
    const Vec2 z = x - mesh_->centers[s];
    const double r2 = norm2(z);
    if (r2 == 0.0) throw std::invalid_argument("layer potential: target coincides with a mesh center");
    const double dn_term = dot(z, mesh_->normals[s]) / (2.0 * kPi * r2);
    // Interval endpoints in lag: row R-L+i spans [tau_{i+1}, tau_i], clipped at zero.
    double tau = t - (R - L) * tg_.dt;
    double u = r2 * c / tau;
    if (u > kNegligibleExponent) continue;
    double e1_hi = has_sl ? exp_integral_e1(u) : 0.0;
    double ex_hi = std::exp(-u);
    double acc = 0.0;
    for (int i = 0; i < L; ++i) {
      const int r = R - L + i;
      const double tau_lo = t - (r + 1) * tg_.dt;
      double e1_lo = 0.0, ex_lo = 0.0;
      bool last = false;
      if (tau_lo > 0.0) {
        const double ul = r2 * c / tau_lo;
        if (ul > kNegligibleExponent) {
          last = true;  // younger rows contribute below exp(-50)
        } else {
          e1_lo = has_sl ? exp_integral_e1(ul) : 0.0;
          ex_lo = std::exp(-ul);
        }
      }
      if (has_sl) acc += (e1_hi - e1_lo) / (4.0 * kPi) * sl_(r, s);
      if (has_dl) acc += dn_term * (ex_hi - ex_lo) * dl_(r, s);
      if (last) break;
      e1_hi = e1_lo;
      ex_hi = ex_lo;
    }
    out += acc * mesh_->lengths[s];
  }
  return out;
}

LayerPotential LayerPotential::scaled(double factor) const {
  LayerPotential c = *this;
  c.coef_ *= factor;
  return c;
}

double LayerPotential::plain_rows(Vec2 x, double t, int row_begin, int row_end) const {
  const int N = mesh_->size();
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  double acc = 0.0;
  for (int r = row_begin; r < row_end; ++r) {
    const double lag = t - tg_.density_time(r);
    const double c = 1.0 / (4.0 * k_ * lag);
    const double base = tg_.dt / (4.0 * kPi * lag);
    double row_acc = 0.0;
    for (int s = 0; s < N; ++s) {
      const Vec2 z = x - mesh_->centers[s];
      const double e = std::exp(-norm2(z) * c) * mesh_->lengths[s];
      double w = has_sl ? sl_(r, s) : 0.0;
      if (has_dl) w += dl_(r, s) * dot(z, mesh_->normals[s]) / (2.0 * k_ * lag);
      row_acc += e * w;
    }
    acc += base * row_acc;
  }
  return coef_ * acc;
}

double LayerPotential::value(Vec2 x, double t) const {
  for (const Vec2& c : mesh_->centers)
    if (c == x) throw std::invalid_argument("layer potential: target coincides with a mesh center");
  const int R = tg_.rows_before(t);
  const int L = std::min(product_rows_, R);
  double v = plain_rows(x, t, 0, R - L);
  if (L > 0) v += coef_ * product_rows_sum(x, t, R, L);
  return v;
}

Vec2 LayerPotential::gradient(Vec2 x, double t) const {
  const int N = mesh_->size();
  const int R = tg_.rows_before(t);
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  Vec2 acc;
  for (int r = 0; r < R; ++r) {
    const double lag = t - tg_.density_time(r);
    const double q = 1.0 / (2.0 * k_ * lag);
    const double base = tg_.dt / (4.0 * kPi * lag);
    for (int s = 0; s < N; ++s) {
      const Vec2 z = x - mesh_->centers[s];
      const Vec2 n = mesh_->normals[s];
      const double e = base * mesh_->lengths[s] * std::exp(-norm2(z) * q * 0.5);
      if (has_sl) acc += (-e * sl_(r, s) * q) * z;
      if (has_dl) acc += (e * dl_(r, s)) * (q * n - (q * q * dot(z, n)) * z);
    }
  }
  return coef_ * acc;
}

std::vector<double> LayerPotential::evaluate(const std::vector<Vec2>& targets, double t) const {
  std::vector<double> out(targets.size(), 0.0);
  accumulate(targets, t, out);
  return out;
}

void LayerPotential::accumulate(const std::vector<Vec2>& targets, double t, std::vector<double>& out) const {
  if (out.size() != targets.size()) throw std::invalid_argument("LayerPotential::accumulate: size mismatch");
  const int R_all = tg_.rows_before(t);
  if (R_all == 0 || coef_ == 0.0) return;
  const int N = mesh_->size();
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  if (!has_sl && !has_dl) return;
  const int L = std::min(product_rows_, R_all);
  const int R = R_all - L;  // rows summed with the midpoint rule

  Eigen::ArrayXd c(R);
  ArrayCol Ws = ArrayCol::Zero(R, N), Wd = ArrayCol::Zero(R, N);
  for (int r = 0; r < R; ++r) {
    const double lag = t - tg_.density_time(r);
    c[r] = 1.0 / (4.0 * k_ * lag);
    const double base = coef_ * tg_.dt / (4.0 * kPi * lag);
    for (int s = 0; s < N; ++s) {
      const double w = base * mesh_->lengths[s];
      if (has_sl) Ws(r, s) = w * sl_(r, s);
      if (has_dl) Wd(r, s) = w * dl_(r, s) / (2.0 * k_ * lag);
    }
  }
  const auto& centers = mesh_->centers;
  const auto& normals = mesh_->normals;
  const long n_targets = static_cast<long>(targets.size());
  std::atomic<bool> on_center{false};
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n_targets; ++i) {
    const Vec2 x = targets[i];
    double acc = 0.0;
    bool hit = false;
    for (int s = 0; s < N && R > 0; ++s) {
      const Vec2 z = x - centers[s];
      const double r2 = norm2(z);
      if (r2 == 0.0) hit = true;
      if (has_dl && has_sl) {
        acc += ((c * (-r2)).exp() * (Ws.col(s) + dot(z, normals[s]) * Wd.col(s))).sum();
      } else if (has_sl) {
        acc += ((c * (-r2)).exp() * Ws.col(s)).sum();
      } else {
        acc += dot(z, normals[s]) * ((c * (-r2)).exp() * Wd.col(s)).sum();
      }
    }
    if (!hit && L > 0) {
      try {
        acc += coef_ * product_rows_sum(x, t, R_all, L);
      } catch (const std::invalid_argument&) {
        hit = true;
      }
    }
    if (hit) on_center = true;
    out[i] += acc;
  }
  if (on_center) throw std::invalid_argument("layer potential: target coincides with a mesh center");
}

namespace {

// Anti-diagonal gather: out(j) = sum_r P(r, lag index of (j, r)).
Eigen::MatrixXd gather_history(const std::vector<Eigen::MatrixXd>& per_target, int M, bool midpoint) {
  const int T = static_cast<int>(per_target.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M, T);
  for (int i = 0; i < T; ++i) {
    const Eigen::MatrixXd& P = per_target[i];
    for (int j = 0; j < M; ++j) {
      double acc = 0.0;
      if (midpoint) {
        for (int r = 0; r < j; ++r) acc += P(r, j - r - 1);  // lag (j - r) dt
      } else {
        for (int r = 0; r <= j; ++r) acc += P(r, j - r);  // lag (j - r + 1/2) dt
      }
      out(j, i) = acc;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd LayerPotential::history(const std::vector<Vec2>& targets, bool midpoint) const {
  return normal_derivative_history(targets, {}, midpoint);
}

Eigen::MatrixXd LayerPotential::normal_derivative_history(const std::vector<Vec2>& targets,
                                                          const std::vector<Vec2>& normals, bool midpoint) const {
  const bool derivative = !normals.empty();
  if (derivative && normals.size() != targets.size()) {
    throw std::invalid_argument("normal_derivative_history: one normal per target required");
  }
  const int M = tg_.M, N = mesh_->size();
  const int D = midpoint ? M - 1 : M;
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  const long n_targets = static_cast<long>(targets.size());
  std::vector<Eigen::MatrixXd> per_target(targets.size());
  if (D <= 0 || (!has_sl && !has_dl)) {
    return Eigen::MatrixXd::Zero(M, static_cast<long>(targets.size()));
  }
  Eigen::ArrayXd lags(D);
  for (int d = 0; d < D; ++d) lags[d] = midpoint ? (d + 1) * tg_.dt : (d + 0.5) * tg_.dt;
  const Eigen::ArrayXd c = 1.0 / (4.0 * k_ * lags);
  const Eigen::ArrayXd q = 1.0 / (2.0 * k_ * lags);
  const Eigen::ArrayXd base = coef_ * tg_.dt / (4.0 * kPi * lags);
  std::atomic<bool> on_center{false};
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n_targets; ++i) {
    const Vec2 x = targets[i];
    const Vec2 m = derivative ? normals[i] : Vec2{};
    Eigen::MatrixXd Ts(N, D), Td(N, D);
    for (int s = 0; s < N; ++s) {
      const Vec2 z = x - mesh_->centers[s];
      const Vec2 n = mesh_->normals[s];
      const double r2 = norm2(z);
      if (r2 == 0.0) on_center = true;
      const Eigen::ArrayXd e = (c * (-r2)).exp() * base * mesh_->lengths[s];
      if (!derivative) {
        if (has_sl) Ts.row(s) = e.matrix().transpose();
        if (has_dl) Td.row(s) = (e * q * dot(z, n)).matrix().transpose();
      } else {
        if (has_sl) Ts.row(s) = (-e * q * dot(z, m)).matrix().transpose();
        if (has_dl) Td.row(s) = (e * (q * dot(n, m) - q * q * dot(z, m) * dot(z, n))).matrix().transpose();
      }
    }
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M, D);
    if (has_sl) P.noalias() += sl_ * Ts;
    if (has_dl) P.noalias() += dl_ * Td;
    per_target[i] = std::move(P);
  }
  if (on_center) throw std::invalid_argument("layer potential: target coincides with a mesh center");
  return gather_history(per_target, M, midpoint);
}

double LayerPotential::value_near(Vec2 x, double t, const NearOptions& opt) const {
  if (opt.recent_rows < 0 || opt.gauss_points < 1 || opt.max_depth < 0 || !(opt.panel_ratio > 0.0)) {
    throw std::invalid_argument("value_near: bad options");
  }
  const int R = tg_.rows_before(t);
  const int L = std::min(opt.recent_rows, R);
  double total = plain_rows(x, t, 0, R - L);
  if (L == 0) return total;

  const ClosedCurve& curve = *mesh_->curve;
  const int N = mesh_->size();
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  std::vector<double> a(L), b(L);
  for (int i = 0; i < L; ++i) {
    const int r = R - L + i;
    a[i] = std::max(t - (r + 1) * tg_.dt, 0.0);
    b[i] = t - r * tg_.dt;
  }
  const GaussRule& gr = gauss_legendre(opt.gauss_points);
  const double width = std::sqrt(4.0 * k_ * tg_.dt);

  auto integrand = [&](double theta) {
    const Vec2 y = curve.position(theta);
    const Vec2 dy = curve.derivative(theta);
    const double sp = norm(dy);
    const Vec2 n{dy.y / sp, -dy.x / sp};
    const Vec2 z = x - y;
    const double r2 = norm2(z);
    if (r2 < 1e-300) return 0.0;
    double acc = 0.0;
    for (int i = 0; i < L; ++i) {
      const int r = R - L + i;
      const double ub = r2 / (4.0 * k_ * b[i]);
      const double ua = a[i] > 0.0 ? r2 / (4.0 * k_ * a[i]) : INFINITY;
      if (has_sl) {
        const double e1a = std::isinf(ua) ? 0.0 : exp_integral_e1(ua);
        acc += (exp_integral_e1(ub) - e1a) / (4.0 * kPi) * interpolate_row(sl_, r, theta, N);
      }
      if (has_dl) {
        const double ea = std::isinf(ua) ? 0.0 : std::exp(-ua);
        acc += dot(z, n) / (2.0 * kPi * r2) * (std::exp(-ub) - ea) * interpolate_row(dl_, r, theta, N);
      }
    }
    return acc * sp;
  };

  std::function<double(double, double, int)> panel = [&](double t0, double t1, int depth) -> double {
    const double tm = 0.5 * (t0 + t1);
    const double len = curve.speed(tm) * (t1 - t0);
    const double dist = norm(x - curve.position(tm));
    if (depth < opt.max_depth && (len > opt.panel_ratio * dist || len > width)) {
      return panel(t0, tm, depth + 1) + panel(tm, t1, depth + 1);
    }
    double s = 0.0;
    const double half = 0.5 * (t1 - t0);
    for (size_t g = 0; g < gr.nodes.size(); ++g) s += gr.weights[g] * integrand(tm + half * gr.nodes[g]);
    return s * half;
  };

  if (opt.geometry == NearGeometry::discrete) return total + coef_ * product_rows_sum(x, t, R, L);
  if (opt.geometry == NearGeometry::polygon) {
    double near = 0.0;
    for (int s = 0; s < N; ++s) {
      const Vec2 pa = mesh_->nodes[s], pb = mesh_->nodes[(s + 1) % N];
      for (int i = 0; i < L; ++i) {
        const int r = R - L + i;
        const double lo = t - (r + 1) * tg_.dt, hi = t - r * tg_.dt;
        if (has_sl && sl_(r, s) != 0.0) {
          near += sl_(r, s) * chord_time_integral(LayerKind::single, x, pa, pb, mesh_->normals[s], lo, hi, k_, opt);
        }
        if (has_dl && dl_(r, s) != 0.0) {
          near += dl_(r, s) * chord_time_integral(LayerKind::dipole, x, pa, pb, mesh_->normals[s], lo, hi, k_, opt);
        }
      }
    }
    return total + coef_ * near;
  }

  double near = 0.0;
  const double h = 2.0 * kPi / N;
  for (int s = 0; s < N; ++s) near += panel(h * s, h * (s + 1), 0);
  return total + coef_ * near;
}

Eigen::MatrixXd LayerPotential::evaluate_steps(const std::vector<Vec2>& targets, const std::vector<int>& steps) const {
  const long n_targets = static_cast<long>(targets.size());
  const int n_steps = static_cast<int>(steps.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_steps, n_targets);
  int D = 0;
  for (int j : steps) {
    if (j < 0 || j > tg_.M) throw std::invalid_argument("evaluate_steps: step out of range");
    D = std::max(D, j);
  }
  const bool has_sl = sl_.size() > 0, has_dl = dl_.size() > 0;
  if (D == 0 || coef_ == 0.0 || (!has_sl && !has_dl)) return out;
  const int N = mesh_->size();
  // lag index d <-> lag (d + 1/2) dt; row r at step j has d = j - 1 - r
  Eigen::ArrayXd c(D), base(D), q(D);
  for (int d = 0; d < D; ++d) {
    const double lag = (d + 0.5) * tg_.dt;
    c[d] = 1.0 / (4.0 * k_ * lag);
    base[d] = coef_ * tg_.dt / (4.0 * kPi * lag);
    q[d] = 1.0 / (2.0 * k_ * lag);
  }
  const auto& centers = mesh_->centers;
  const auto& normals = mesh_->normals;
  std::atomic<bool> on_center{false};
#pragma omp parallel
  {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Ts(D, N), Td(D, N);
#pragma omp for schedule(static)
    for (long i = 0; i < n_targets; ++i) {
      const Vec2 x = targets[i];
      bool hit = false;
      for (int s = 0; s < N; ++s) {
        const Vec2 z = x - centers[s];
        const double r2 = norm2(z);
        if (r2 == 0.0) hit = true;
        const Eigen::ArrayXd e = (c * (-r2)).exp() * base * mesh_->lengths[s];
        if (has_sl) Ts.col(s) = e.matrix();
        if (has_dl) Td.col(s) = (e * q * dot(z, normals[s])).matrix();
      }
      if (hit) {
        on_center = true;
        continue;
      }
      for (int p = 0; p < n_steps; ++p) {
        const int j = steps[p];
        const double t = tg_.step_time(j);
        const int L = std::min(product_rows_, j);
        double acc = 0.0;
        for (int r = 0; r < j - L; ++r) {
          const int d = j - 1 - r;
          if (has_sl) acc += sl_.row(r).dot(Ts.row(d));
          if (has_dl) acc += dl_.row(r).dot(Td.row(d));
        }
        if (L > 0) acc += coef_ * product_rows_sum(x, t, j, L);
        out(p, i) = acc;
      }
    }
  }
  if (on_center) throw std::invalid_argument("layer potential: target coincides with a mesh center");
  return out;
}

namespace {

// a E1(a^2/c) + sqrt(pi c) erf(a / sqrt(c)) = int_0^a E1(s^2/c) ds
double e1_line_integral(double a, double c) {
  if (a <= 0.0) return 0.0;
  const double u = a * a / c;
  return (u > 700.0 ? 0.0 : a * exp_integral_e1(u)) + std::sqrt(kPi * c) * std::erf(a / std::sqrt(c));
}

}  // namespace

double chord_time_integral(LayerKind kind, Vec2 x, Vec2 a, Vec2 b, Vec2 n, double tau_lo, double tau_hi, double k,
                           const NearOptions& opt) {
  if (!(tau_hi > 0.0)) return 0.0;
  const bool has_lo = tau_lo > 0.0;
  const double c_hi = 4.0 * k * tau_hi;
  const double c_lo = has_lo ? 4.0 * k * tau_lo : 0.0;
  const Vec2 d = b - a;
  const double len = norm(d);
  const Vec2 e = d / len;
  const double along = dot(x - a, e);
  const double off = std::abs(cross(e, x - a));
  if (off <= 1e-13 * len && along >= 0.0 && along <= len) {
    if (kind == LayerKind::dipole) return 0.0;
    double v = e1_line_integral(along, c_hi) + e1_line_integral(len - along, c_hi);
    if (has_lo) v -= e1_line_integral(along, c_lo) + e1_line_integral(len - along, c_lo);
    return v / (4.0 * kPi);
  }
  auto f = [&](double sp) {
    const Vec2 z = x - (a + sp * e);
    const double r2 = norm2(z);
    if (r2 < 1e-300) return 0.0;
    if (kind == LayerKind::single) {
      const double uh = r2 / c_hi;
      double v = uh > 700.0 ? 0.0 : exp_integral_e1(uh);
      if (has_lo) {
        const double ul = r2 / c_lo;
        v -= ul > 700.0 ? 0.0 : exp_integral_e1(ul);
      }
      return v / (4.0 * kPi);
    }
    double v = std::exp(-r2 / c_hi);
    if (has_lo) v -= std::exp(-r2 / c_lo);
    return dot(z, n) / (2.0 * kPi * r2) * v;
  };
  const GaussRule& gr = gauss_legendre(opt.gauss_points);
  const double width = std::sqrt(has_lo ? c_lo : c_hi);
  std::function<double(double, double, int)> panel = [&](double s0, double s1, int depth) -> double {
    const double sm = 0.5 * (s0 + s1);
    const double plen = s1 - s0;
    const double dist = norm(x - (a + sm * e));
    if (depth < opt.max_depth && (plen > opt.panel_ratio * dist || (plen > width && dist < plen + 8.0 * width))) {
      return panel(s0, sm, depth + 1) + panel(sm, s1, depth + 1);
    }
    double acc = 0.0;
    for (size_t g = 0; g < gr.nodes.size(); ++g) acc += gr.weights[g] * f(sm + 0.5 * plen * gr.nodes[g]);
    return 0.5 * plen * acc;
  };
  return panel(0.0, len, 0);
}

BlockConvOperator assemble_operator_corrected(LayerKind kind, const BoundaryMesh& mesh, const TimeGrid& tg, double k,
                                              int exact_lags, const NearOptions& opt) {
  BlockConvOperator op = assemble_operator(kind, mesh, tg, k);
  const int N = mesh.size();
  const int L = std::min(std::max(exact_lags, 0), tg.M);
  const double w = k * tg.dt;
  const long work = static_cast<long>(L) * N;
#pragma omp parallel for schedule(dynamic, 1)
  for (long idx = 0; idx < work; ++idx) {
    const int i = static_cast<int>(idx / N);
    const int c = static_cast<int>(idx % N);
    const Vec2 pa = mesh.nodes[c], pb = mesh.nodes[(c + 1) % N];
    for (int r = 0; r < N; ++r) {
      op.blocks[i](r, c) =
          chord_time_integral(kind, mesh.centers[r], pa, pb, mesh.normals[c], i * tg.dt, (i + 1) * tg.dt, k, opt) / w;
    }
  }
  return op;
}

namespace {

std::vector<double> eval_layer(LayerKind kind, const BoundaryMesh& mesh, const SpaceTimeDensity& density,
                               const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k) {
  if (j < 0 || j > tg.M) throw std::invalid_argument("eval layer: step index out of range");
  check_shape(density, tg.M, mesh.size(), "eval layer");
  auto m = std::make_shared<const BoundaryMesh>(mesh);
  SpaceTimeDensity empty;
  const LayerPotential lp = kind == LayerKind::single ? LayerPotential(m, tg, k, density, empty)
                                                      : LayerPotential(m, tg, k, empty, density);
  return lp.evaluate(targets, tg.step_time(j));
}

}  // namespace

std::vector<double> eval_single_layer(const BoundaryMesh& mesh, const SpaceTimeDensity& density,
                                      const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k) {
  return eval_layer(LayerKind::single, mesh, density, targets, tg, j, k);
}

std::vector<double> eval_double_layer(const BoundaryMesh& mesh, const SpaceTimeDensity& density,
                                      const std::vector<Vec2>& targets, const TimeGrid& tg, int j, double k) {
  return eval_layer(LayerKind::dipole, mesh, density, targets, tg, j, k);
}

}  // namespace heatcloak
