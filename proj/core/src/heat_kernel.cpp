#include "heatcloak/heat_kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace heatcloak {

namespace {

constexpr double kEinSwitch = 30.0;

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0)) {
    throw std::invalid_argument(std::string(what) + ": time must be positive, got " + std::to_string(t));
  }
}

// e^{-z} sum_{n>=1} H_n z^n / n!. All terms positive, so no cancellation.
double ein_series(double z) {
  double term = 1.0;  // z^n / n!
  double harmonic = 0.0;
  double sum = 0.0;
  for (int n = 1; n < 500; ++n) {
    term *= z / n;
    harmonic += 1.0 / n;
    const double add = term * harmonic;
    sum += add;
    if (n > z && add < 1e-17 * sum) break;
  }
  return std::exp(-z) * sum;
}

// Modified Lentz evaluation of the continued fraction for E1, valid for z >= 1.
double e1_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

}  // namespace

Diffusivity::Diffusivity(double k) : k_(k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("diffusivity must be positive and finite, got " + std::to_string(k));
  }
}

double kernel_value(Vec2 x, double t, Diffusivity k, int d) {
  if (d < 1) throw std::invalid_argument("kernel_value: dimension must be >= 1");
  if (!(t > 0.0)) return 0.0;
  const double s = 4.0 * kPi * k.value() * t;
  const double pre = d == 2 ? 1.0 / s : std::pow(s, -0.5 * d);
  return pre * std::exp(-norm2(x) / (4.0 * k.value() * t));
}

double kernel_value_r2(double r2, double t, double k) {
  if (!(t > 0.0)) return 0.0;
  return std::exp(-r2 / (4.0 * k * t)) / (4.0 * kPi * k * t);
}

Vec2 kernel_gradient(Vec2 x, double t, Diffusivity k) {
  require_positive_time(t, "kernel_gradient");
  const double kv = kernel_value(x, t, k);
  return (-2.0 * kv / (4.0 * k.value() * t)) * x;
}

double kernel_normal_derivative(Vec2 x, Vec2 n, double t, Diffusivity k) {
  if (std::abs(norm(n) - 1.0) > 1e-12) {
    throw std::invalid_argument("kernel_normal_derivative: normal is not unit length");
  }
  return dot(kernel_gradient(x, t, k), n);
}

double ein(double z) {
  if (std::isnan(z) || z < 0.0) throw std::invalid_argument("ein: argument must be nonnegative");
  if (z == 0.0) return 0.0;
  if (z <= kEinSwitch) return ein_series(z);
  if (std::isinf(z)) return z;
  return e1_continued_fraction(z) + std::log(z) + kEulerGamma;
}

double exp_integral_e1(double z) {
  if (!(z > 0.0)) throw std::invalid_argument("exp_integral_e1: argument must be positive");
  if (z > 700.0) return 0.0;
  if (z >= 1.0) return e1_continued_fraction(z);
  return -kEulerGamma - std::log(z) + ein_series(z);
}

double phi_value(Vec2 x, double t, Diffusivity k) {
  require_positive_time(t, "phi_value");
  return -ein(norm2(x) / (4.0 * k.value() * t)) / (4.0 * kPi);
}

Vec2 phi_gradient(Vec2 x, double t, Diffusivity k) {
  require_positive_time(t, "phi_gradient");
  const double s = 4.0 * k.value() * t;
  const double z = norm2(x) / s;
  const double dein = z < 1e-12 ? 1.0 - 0.5 * z : -std::expm1(-z) / z;
  return (-dein * 2.0 / (4.0 * kPi * s)) * x;
}

SpaceTimeField kernel_field(Diffusivity k) {
  return {[k](Vec2 x, double t) { return kernel_value(x, t, k); },
          [k](Vec2 x, double t) { return kernel_gradient(x, t, k); }};
}

SpaceTimeField kernel_x1_derivative_field(Diffusivity k) {
  return {[k](Vec2 x, double t) { return kernel_gradient(x, t, k).x; },
          [k](Vec2 x, double t) {
            // d/dx_j of -x1 K / (2kt)
            const double c = 1.0 / (2.0 * k.value() * t);
            const double kv = kernel_value(x, t, k);
            return Vec2{-c * kv + c * c * x.x * x.x * kv, c * c * x.x * x.y * kv};
          }};
}

void GrowthParams::validate() const {
  if (!(C > 0.0)) throw std::invalid_argument("growth params: C must be positive");
  if (a < 0.0) throw std::invalid_argument("growth params: a must be nonnegative");
  if (b < 0.0 || b >= 2.0) throw std::invalid_argument("growth params: b must lie in [0,2)");
  if (!(r0 > 0.0)) throw std::invalid_argument("growth params: r0 must be positive");
}

double GrowthParams::bound(double r) const { return C * std::pow(r, m) * std::exp(a * std::pow(r, b)); }

double growth_residual(const SpaceTimeField& field, double r, Vec2 xi, double t, Diffusivity k) {
  require_positive_time(t, "growth_residual");
  const Vec2 x = r * xi;
  const double v = field.value(x, t);
  double dvdn;
  if (field.gradient) {
    dvdn = dot(field.gradient(x, t), xi);
  } else {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, r);
    dvdn = (field.value((r + h) * xi, t) - field.value((r - h) * xi, t)) / (2.0 * h);
  }
  return std::abs(dvdn + (2.0 * r / (4.0 * k.value() * t)) * v);
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw std::invalid_argument("log_space: bad range");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + step * i);
  out.back() = hi;
  return out;
}

GrowthSweep growth_residual_sweep(const SpaceTimeField& field, Diffusivity k, double r_lo, double r_hi,
                                  int n_r, double t_lo, double t_hi, int n_t, int n_dir,
                                  const std::optional<GrowthParams>& params) {
  if (params) params->validate();
  if (n_dir < 1) throw std::invalid_argument("growth_residual_sweep: need at least one direction");
  GrowthSweep out;
  const auto rs = log_space(r_lo, r_hi, n_r);
  const auto ts = log_space(t_lo, t_hi, n_t);
  for (int d = 0; d < n_dir; ++d) {
    const double ang = 2.0 * kPi * d / n_dir + 0.1;
    const Vec2 xi{std::cos(ang), std::sin(ang)};
    for (double r : rs) {
      for (double t : ts) {
        const double res = growth_residual(field, r, xi, t, k);
        if (!std::isfinite(res)) {
          out.all_finite = false;
          continue;
        }
        if (res > out.max_residual) {
          out.max_residual = res;
          out.argmax_r = r;
          out.argmax_t = t;
        }
        if (params) out.max_ratio = std::max(out.max_ratio, res / params->bound(r));
      }
    }
  }
  return out;
}

double heat_equation_residual(const std::function<double(Vec2, double)>& u, Vec2 x, double t,
                              Diffusivity k, double h, double dt_step) {
  if (!(h > 0.0) || !(dt_step > 0.0)) throw std::invalid_argument("heat_equation_residual: steps must be positive");
  const double u0 = u(x, t);
  auto d2 = [&](Vec2 e) {
    const double fp1 = u(x + h * e, t), fm1 = u(x - h * e, t);
    const double fp2 = u(x + 2.0 * h * e, t), fm2 = u(x - 2.0 * h * e, t);
    return (-fp2 + 16.0 * fp1 - 30.0 * u0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  };
  const double lap = d2({1.0, 0.0}) + d2({0.0, 1.0});
  const double ut = (-u(x, t + 2.0 * dt_step) + 8.0 * u(x, t + dt_step) - 8.0 * u(x, t - dt_step) +
                     u(x, t - 2.0 * dt_step)) /
                    (12.0 * dt_step);
  return std::abs(ut - k.value() * lap);
}

}  // namespace heatcloak
