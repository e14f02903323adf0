#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <stdexcept>

#include "heatcloak/heat_kernel.hpp"
#include "heatcloak/scenarios.hpp"

namespace heatcloak {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr unsigned kDepth = 18;
constexpr double kTol = 1e-11;

// Adaptive on [0, 2 pi] split into quarters so that narrow features are not missed by the first rule.
template <class F>
double periodic_integral(F f) {
  double acc = 0.0;
  for (int q = 0; q < 8; ++q) acc += GK::integrate(f, q * kPi / 4.0, (q + 1) * kPi / 4.0, kDepth, kTol);
  return acc;
}

}  // namespace

std::vector<HarmonicCheck> verify_harmonic_identity(const Polynomial2& f, const ClosedCurve& curve, double t,
                                                    double k, const std::vector<Vec2>& points) {
  if (!f.is_harmonic()) throw std::invalid_argument("verify_harmonic_identity: f is not harmonic");
  if (!(t > 0.0)) throw std::invalid_argument("verify_harmonic_identity: t must be positive");
  if (!curve.star_shaped()) throw std::invalid_argument("verify_harmonic_identity: curve must be star-shaped");
  const Diffusivity kd(k);
  const Vec2 c = curve.centroid();
  std::vector<HarmonicCheck> out;
  for (const Vec2& x : points) {
    HarmonicCheck h;
    h.x = x;
    // volume: y = c + s (gamma(theta) - c), dy = s |(gamma - c) x gamma'| ds dtheta
    h.volume = periodic_integral([&](double th) {
      const Vec2 g = curve.position(th) - c;
      const double jac = std::abs(cross(g, curve.derivative(th)));
      auto radial = [&](double s) {
        const Vec2 y = c + s * g;
        return f.value(y) * kernel_value(x - y, t, kd) * s;
      };
      return jac * GK::integrate(radial, 0.0, 1.0, kDepth, kTol);
    });
    // boundary: f grad phi(x - y) . n + phi(x - y) df/dn
    h.boundary = periodic_integral([&](double th) {
      const Vec2 y = curve.position(th);
      const Vec2 n = curve.normal(th);
      const Vec2 z = x - y;
      return (f.value(y) * dot(phi_gradient(z, t, kd), n) + phi_value(z, t, kd) * dot(f.gradient(y), n)) *
             curve.speed(th);
    });
    out.push_back(h);
  }
  return out;
}

}  // namespace heatcloak
