#include <gtest/gtest.h>

#include <boost/math/special_functions/expint.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "heatcloak/heat_kernel.hpp"

using namespace heatcloak;
using boost::multiprecision::cpp_bin_float_100;

namespace {

// Defining alternating series summed in 100 decimal digits; the largest term near z = 30 is
// about 1e11, so cancellation leaves well over 80 correct digits.
double ein_series_oracle(double zd) {
  const cpp_bin_float_100 z = zd;
  cpp_bin_float_100 term = z;  // z^n / n!
  cpp_bin_float_100 sum = 0;
  for (int n = 1; n < 2000; ++n) {
    if (n > 1) term *= z / n;
    const cpp_bin_float_100 add = (n % 2 ? term : -term) / n;
    sum += add;
    if (n > 2 * zd + 10 && abs(add) < cpp_bin_float_100(1e-60) * abs(sum)) break;
  }
  return static_cast<double>(sum);
}

double kernel_oracle(double x, double y, double t, double k) {
  const cpp_bin_float_100 r2 = cpp_bin_float_100(x) * x + cpp_bin_float_100(y) * y;
  const cpp_bin_float_100 four_kt = 4 * cpp_bin_float_100(k) * t;
  return static_cast<double>(exp(-r2 / four_kt) / (boost::math::constants::pi<cpp_bin_float_100>() * four_kt));
}

}  // namespace

TEST(EinOracle, MatchesSeriesOnSeriesRange) {
  for (double z : {1e-12, 1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 17.3, 25.0, 29.999}) {
    const double ref = ein_series_oracle(z);
    EXPECT_NEAR(ein(z), ref, 1e-12 * std::abs(ref)) << "z=" << z;
  }
}

TEST(EinOracle, MatchesSeriesAboveSwitchover) {
  for (double z : {30.0, 30.001, 35.0, 45.0, 60.0}) {
    const double ref = ein_series_oracle(z);
    EXPECT_NEAR(ein(z), ref, 1e-12 * std::abs(ref)) << "z=" << z;
  }
}

TEST(EinOracle, SpecExampleValue) { EXPECT_NEAR(ein_series_oracle(1.0), 0.7965996, 5e-8); }

TEST(E1Oracle, MatchesBoostExpint) {
  for (double z : {1e-8, 1e-3, 0.2, 1.0, 3.0, 10.0, 29.0, 31.0, 50.0, 200.0, 700.0}) {
    const double ref = boost::math::expint(1, z);
    EXPECT_NEAR(exp_integral_e1(z), ref, 1e-13 * ref) << "z=" << z;
  }
}

TEST(E1Oracle, EinIdentity) {
  for (double z : {0.5, 3.0, 12.0, 40.0, 90.0}) {
    const double rhs = boost::math::expint(1, z) + std::log(z) + kEulerGamma;
    EXPECT_NEAR(ein(z), rhs, 1e-12 * std::abs(rhs)) << "z=" << z;
  }
}

TEST(KernelOracle, HighPrecisionValues) {
  struct Case {
    double x, y, t, k;
  };
  for (const Case& c : {Case{0.1, 0.1, 0.1, 0.2}, Case{0.0, 0.0, 1e-4, 0.3}, Case{0.3, -0.4, 0.02, 0.3},
                        Case{2.0, 1.0, 5.0, 0.2}, Case{0.05, 0.0, 1e-3, 0.3}}) {
    const double ref = kernel_oracle(c.x, c.y, c.t, c.k);
    EXPECT_NEAR(kernel_value({c.x, c.y}, c.t, c.k), ref, 1e-14 * ref);
  }
  EXPECT_NEAR(kernel_oracle(0.1, 0.1, 0.1, 0.2), 3.0988, 1e-4);
}

TEST(PhiOracle, MatchesSeriesAtFourKt) {
  const double k = 0.3, t = 0.1;
  EXPECT_NEAR(phi_value({std::sqrt(4 * k * t), 0.0}, t, k), -ein_series_oracle(1.0) / (4 * kPi), 1e-15);
  EXPECT_NEAR(-ein_series_oracle(1.0) / (4 * kPi), -0.0633914, 5e-7);
}
