#include <gtest/gtest.h>

#include <cmath>

#include "heatcloak/heat_kernel.hpp"

using namespace heatcloak;

TEST(Diffusivity, RejectsNonPositive) {
  EXPECT_THROW(Diffusivity(0.0), std::invalid_argument);
  EXPECT_THROW(Diffusivity(-0.3), std::invalid_argument);
  EXPECT_THROW(Diffusivity(NAN), std::invalid_argument);
  EXPECT_DOUBLE_EQ(Diffusivity(0.3).value(), 0.3);
}

TEST(KernelValue, ZeroForNonPositiveTime) {
  EXPECT_EQ(kernel_value({1.0, 0.0}, 0.0, 0.3), 0.0);
  EXPECT_EQ(kernel_value({0.0, 0.0}, -1.0, 0.3), 0.0);
}

TEST(KernelValue, PeakAtOrigin) {
  for (double t : {1e-3, 0.1, 7.0}) EXPECT_NEAR(kernel_value({0.0, 0.0}, t, 0.2), 1.0 / (4.0 * kPi * 0.2 * t), 1e-12);
}

TEST(KernelValue, DirectEvaluation) {
  EXPECT_NEAR(kernel_value({0.1, 0.1}, 0.1, 0.2), 3.0988, 1e-4);
  EXPECT_NEAR(kernel_value({0.1, 0.1}, 0.1, 0.2), kernel_value_r2(0.02, 0.1, 0.2), 1e-14);
}

TEST(KernelValue, OtherDimensions) {
  EXPECT_NEAR(kernel_value({0.0, 0.0}, 0.5, 0.2, 1), 1.0 / std::sqrt(4.0 * kPi * 0.1), 1e-14);
  EXPECT_NEAR(kernel_value({0.0, 0.0}, 0.5, 0.2, 3), std::pow(4.0 * kPi * 0.1, -1.5), 1e-14);
}

TEST(KernelValue, VanishesMonotonicallyAsTimeShrinks) {
  const Vec2 x{0.3, -0.1};
  const double k = 0.3, t_mono = norm2(x) / (2.0 * k * 2.0);
  double prev = kernel_value(x, t_mono, k);
  for (double t = t_mono * 0.9; t > 1e-4; t *= 0.9) {
    const double v = kernel_value(x, t, k);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-30);
}

TEST(KernelGradient, Examples) {
  const Vec2 g0 = kernel_gradient({0.0, 0.0}, 0.3, 0.2);
  EXPECT_EQ(g0.x, 0.0);
  EXPECT_EQ(g0.y, 0.0);
  const Vec2 g = kernel_gradient({0.1, 0.0}, 0.1, 0.2);
  EXPECT_NEAR(g.x, -8.7786, 5e-4);
  EXPECT_NEAR(g.y, 0.0, 1e-15);
  EXPECT_THROW(kernel_gradient({0.1, 0.0}, 0.0, 0.2), std::invalid_argument);
}

TEST(KernelGradient, OddAndMatchesFiniteDifferences) {
  const double k = 0.3, t = 0.05;
  for (Vec2 x : {Vec2{0.1, 0.05}, Vec2{-0.2, 0.3}, Vec2{0.01, -0.02}}) {
    const Vec2 g = kernel_gradient(x, t, k), gm = kernel_gradient(-1.0 * x, t, k);
    EXPECT_NEAR(g.x, -gm.x, 1e-14 * std::abs(g.x) + 1e-300);
    EXPECT_NEAR(g.y, -gm.y, 1e-14 * std::abs(g.y) + 1e-300);
    const double h = 1e-6;
    const double fx = (kernel_value(x + Vec2{h, 0}, t, k) - kernel_value(x - Vec2{h, 0}, t, k)) / (2 * h);
    const double fy = (kernel_value(x + Vec2{0, h}, t, k) - kernel_value(x - Vec2{0, h}, t, k)) / (2 * h);
    EXPECT_NEAR(g.x, fx, 1e-6 * (1.0 + std::abs(fx)));
    EXPECT_NEAR(g.y, fy, 1e-6 * (1.0 + std::abs(fy)));
  }
}

TEST(KernelNormalDerivative, Examples) {
  EXPECT_EQ(kernel_normal_derivative({0.0, 0.0}, {1.0, 0.0}, 0.1, 0.2), 0.0);
  EXPECT_NEAR(kernel_normal_derivative({0.1, 0.0}, {1.0, 0.0}, 0.1, 0.2), -8.7786, 5e-4);
  EXPECT_NEAR(kernel_normal_derivative({0.1, 0.0}, {0.0, 1.0}, 0.1, 0.2), 0.0, 1e-15);
  EXPECT_THROW(kernel_normal_derivative({0.1, 0.0}, {1.0, 1.0}, 0.1, 0.2), std::invalid_argument);
  EXPECT_THROW(kernel_normal_derivative({0.1, 0.0}, {1.0 + 1e-9, 0.0}, 0.1, 0.2), std::invalid_argument);
}

TEST(Ein, Examples) {
  EXPECT_EQ(ein(0.0), 0.0);
  EXPECT_NEAR(ein(1.0), 0.7965996, 5e-8);
  EXPECT_THROW(ein(-1e-3), std::invalid_argument);
}

TEST(Ein, DerivativeMatchesAnalyticForm) {
  for (double z : {0.01, 0.5, 2.0, 10.0, 29.0, 31.0, 80.0}) {
    const double h = 1e-5 * std::max(1.0, z);
    const double fd = (ein(z + h) - ein(z - h)) / (2 * h);
    EXPECT_NEAR(fd, -std::expm1(-z) / z, 1e-7) << "z=" << z;
  }
}

TEST(Ein, BranchesAgreeAtSwitchover) {
  const double z = 30.0;
  const double via_e1 = exp_integral_e1(z) + std::log(z) + kEulerGamma;
  EXPECT_NEAR(ein(z), via_e1, 1e-10 * via_e1);
  EXPECT_NEAR(ein(std::nextafter(z, 0.0)), ein(std::nextafter(z, 100.0)), 1e-10 * via_e1);
}

TEST(ExpIntegralE1, RejectsNonPositive) {
  EXPECT_THROW(exp_integral_e1(0.0), std::invalid_argument);
  EXPECT_THROW(exp_integral_e1(-2.0), std::invalid_argument);
}

TEST(Phi, Examples) {
  EXPECT_EQ(phi_value({0.0, 0.0}, 0.1, 0.3), 0.0);
  const double k = 0.3, t = 0.1, r = std::sqrt(4.0 * k * t);
  EXPECT_NEAR(phi_value({r, 0.0}, t, k), -0.0633914, 5e-7);
  EXPECT_THROW(phi_value({0.1, 0.0}, 0.0, k), std::invalid_argument);
  double prev = 0.0;
  for (double x = 0.05; x < 3.0; x += 0.05) {
    const double v = std::abs(phi_value({x, 0.0}, t, k));
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Phi, LaplacianIsMinusKernel) {
  const double k = 0.2, t = 0.07, h = 1e-3;
  for (Vec2 x : {Vec2{0.1, 0.2}, Vec2{-0.3, 0.05}, Vec2{0.02, 0.01}}) {
    const double lap = (phi_value(x + Vec2{h, 0}, t, k) + phi_value(x - Vec2{h, 0}, t, k) +
                        phi_value(x + Vec2{0, h}, t, k) + phi_value(x - Vec2{0, h}, t, k) - 4 * phi_value(x, t, k)) /
                       (h * h);
    EXPECT_NEAR(lap, -kernel_value(x, t, k), 1e-5 * kernel_value({0, 0}, t, k));
    const Vec2 g = phi_gradient(x, t, k);
    const double gx = (phi_value(x + Vec2{1e-6, 0}, t, k) - phi_value(x - Vec2{1e-6, 0}, t, k)) / 2e-6;
    const double gy = (phi_value(x + Vec2{0, 1e-6}, t, k) - phi_value(x - Vec2{0, 1e-6}, t, k)) / 2e-6;
    EXPECT_NEAR(g.x, gx, 1e-7);
    EXPECT_NEAR(g.y, gy, 1e-7);
  }
}

TEST(HeatResidual, KernelSolvesHeatEquation) {
  const double k = 0.3;
  auto u = [k](Vec2 x, double t) { return kernel_value(x, t, k); };
  for (Vec2 x : {Vec2{0.1, 0.0}, Vec2{0.2, -0.3}, Vec2{0.5, 0.5}}) {
    for (double t : {0.02, 0.1, 1.0}) {
      const double scale = std::sqrt(k * t);
      const double res = heat_equation_residual(u, x, t, k, 0.05 * scale, 0.01 * t);
      EXPECT_LE(res, 1e-4 * std::max(std::abs(u(x, t)), 1.0)) << x.x << "," << x.y << " t=" << t;
    }
  }
}

TEST(GrowthResidual, ZeroFieldAndBoundedKernel) {
  SpaceTimeField zero{[](Vec2, double) { return 0.0; }, {}};
  EXPECT_EQ(growth_residual(zero, 2.0, {1.0, 0.0}, 0.3, 0.3), 0.0);
  for (const auto& field : {kernel_field(0.3), kernel_x1_derivative_field(0.3)}) {
    const GrowthSweep s = growth_residual_sweep(field, 0.3, 1.5, 50.0, 24, 1e-3, 1e3, 24);
    EXPECT_TRUE(s.all_finite);
    EXPECT_TRUE(std::isfinite(s.max_residual));
    EXPECT_LT(s.max_residual, 1.0);
  }
}

TEST(GrowthResidual, AnalyticAndFiniteDifferenceRadialDerivativesAgree) {
  const SpaceTimeField with_grad = kernel_field(0.2);
  const SpaceTimeField without{with_grad.value, {}};
  for (double r : {0.3, 1.0, 2.5}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const double a = growth_residual(with_grad, r, {0.6, 0.8}, t, 0.2);
      const double b = growth_residual(without, r, {0.6, 0.8}, t, 0.2);
      EXPECT_NEAR(a, b, 1e-7 * (1.0 + a));
    }
  }
}

TEST(GrowthParams, Validation) {
  GrowthParams p;
  EXPECT_NO_THROW(p.validate());
  p.b = 2.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.r0 = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.C = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.a = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(LogSpace, Endpoints) {
  const auto v = log_space(1e-3, 1e3, 7);
  ASSERT_EQ(v.size(), 7u);
  EXPECT_DOUBLE_EQ(v.front(), 1e-3);
  EXPECT_DOUBLE_EQ(v.back(), 1e3);
  EXPECT_NEAR(v[3], 1.0, 1e-12);
  EXPECT_THROW(log_space(0.0, 1.0, 3), std::invalid_argument);
}
