#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "heatcloak/vec2.hpp"

namespace heatcloak {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Thermal diffusivity k (m^2/s). Constructing from a non-positive value throws.
class Diffusivity {
 public:
  Diffusivity(double k);  // NOLINT(google-explicit-constructor): plain numbers are the common input
  double value() const noexcept { return k_; }
  operator double() const noexcept { return k_; }  // NOLINT

 private:
  double k_;
};

/// Heat kernel (4 pi k t)^{-d/2} exp(-|x|^2 / 4kt); exactly 0 for t <= 0.
double kernel_value(Vec2 x, double t, Diffusivity k, int d = 2);

/// Same kernel in 2-D given the squared distance.
double kernel_value_r2(double r2, double t, double k);

/// Spatial gradient K(x,t) * (-2x / 4kt). Throws for t <= 0.
Vec2 kernel_gradient(Vec2 x, double t, Diffusivity k);

/// dot(kernel_gradient, n); n must be a unit vector within 1e-12.
double kernel_normal_derivative(Vec2 x, Vec2 n, double t, Diffusivity k);

/// Entire exponential integral Ein(z) = sum_{n>=1} (-1)^{n+1} z^n / (n n!). Throws for z < 0.
double ein(double z);

/// Exponential integral E1(z) for z > 0.
double exp_integral_e1(double z);

/// 2-D initial-condition kernel -Ein(|x|^2/4kt) / (4 pi). Throws for t <= 0.
double phi_value(Vec2 x, double t, Diffusivity k);

/// Gradient of phi_value; satisfies Laplacian(phi) = -K.
Vec2 phi_gradient(Vec2 x, double t, Diffusivity k);

/// A scalar space-time field with an optional analytic spatial gradient.
struct SpaceTimeField {
  std::function<double(Vec2, double)> value;
  std::function<Vec2(Vec2, double)> gradient;  // may be empty
};

/// Heat kernel as a field, and its x1-derivative.
SpaceTimeField kernel_field(Diffusivity k);
SpaceTimeField kernel_x1_derivative_field(Diffusivity k);

/// Bound C r^m exp(a r^b) of the growth condition.
struct GrowthParams {
  double C = 1.0;
  double a = 0.0;
  double b = 0.0;
  int m = 0;
  double r0 = 1.0;

  void validate() const;
  double bound(double r) const;
};

/// |dv/dn(r xi, t) + (2r/4kt) v(r xi, t)|, with dv/dn the radial derivative.
/// Falls back to central differences when the field has no gradient.
double growth_residual(const SpaceTimeField& field, double r, Vec2 xi, double t, Diffusivity k);

struct GrowthSweep {
  double max_residual = 0.0;
  double max_ratio = 0.0;  // max residual / bound, when params were given
  double argmax_r = 0.0;
  double argmax_t = 0.0;
  bool all_finite = true;
};

/// Log-spaced sweep over r in [r_lo, r_hi] and t in [t_lo, t_hi], n_dir unit directions.
GrowthSweep growth_residual_sweep(const SpaceTimeField& field, Diffusivity k, double r_lo, double r_hi,
                                  int n_r, double t_lo, double t_hi, int n_t, int n_dir = 8,
                                  const std::optional<GrowthParams>& params = std::nullopt);

/// |u_t - k Laplacian u| at (x,t) from fourth-order central differences with spatial step h
/// and temporal step dt_step.
double heat_equation_residual(const std::function<double(Vec2, double)>& u, Vec2 x, double t,
                              Diffusivity k, double h, double dt_step);

std::vector<double> log_space(double lo, double hi, int n);

}  // namespace heatcloak
