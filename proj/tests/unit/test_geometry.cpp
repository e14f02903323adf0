#include <gtest/gtest.h>

#include <cmath>

#include "heatcloak/geometry.hpp"
#include "heatcloak/heat_kernel.hpp"

using namespace heatcloak;

TEST(MakeCurve, CircleExample) {
  auto c = make_curve(Circle{{0.5, 0.5}, 0.25});
  const Vec2 p = c->position(0.0), n = c->normal(0.0);
  EXPECT_NEAR(p.x, 0.75, 1e-15);
  EXPECT_NEAR(p.y, 0.5, 1e-15);
  EXPECT_NEAR(n.x, 1.0, 1e-15);
  EXPECT_NEAR(n.y, 0.0, 1e-15);
  EXPECT_NEAR(c->area(), kPi * 0.0625, 1e-5);
  EXPECT_NEAR(c->diameter(), 0.5, 1e-5);
  EXPECT_NEAR(c->centroid().x, 0.5, 1e-12);
  EXPECT_TRUE(c->star_shaped());
}

TEST(MakeCurve, KiteParametrization) {
  const Vec2 center{0.5, 0.5};
  auto c = make_curve(Kite{center, 0.1});
  for (double th : {0.0, 0.7, 2.0, 4.5}) {
    const Vec2 p = c->position(th);
    EXPECT_NEAR(p.x, 0.5 + 0.1 * (std::cos(th) + 0.65 * std::cos(2 * th) - 0.65), 1e-15);
    EXPECT_NEAR(p.y, 0.5 + 0.1 * 1.5 * std::sin(th), 1e-15);
  }
  const auto poly = c->polygon(1024);
  EXPECT_GT(polygon_area(poly), 0.0);
  EXPECT_EQ(winding_number(poly, c->centroid()), 1);
  EXPECT_EQ(winding_number(poly, {2.0, 2.0}), 0);
}

TEST(MakeCurve, FlowerRadius) {
  auto c = make_curve(Flower{{0.5, 0.5}, 0.12, 0.03, 5});
  for (double th : {0.0, 0.3, 1.1}) EXPECT_NEAR(norm(c->position(th) - Vec2{0.5, 0.5}), 0.12 + 0.03 * std::cos(5 * th), 1e-14);
  EXPECT_GT(polygon_area(c->polygon(1024)), 0.0);
}

TEST(MakeCurve, RejectsBadParameters) {
  EXPECT_THROW(make_curve(Circle{{0, 0}, 0.0}), std::invalid_argument);
  EXPECT_THROW(make_curve(Kite{{0, 0}, -1.0}), std::invalid_argument);
  EXPECT_THROW(make_curve(Flower{{0, 0}, 0.1, 0.1, 5}), std::invalid_argument);
  EXPECT_THROW(make_curve(Flower{{0, 0}, 0.1, 0.2, 5}), std::invalid_argument);
  EXPECT_THROW(make_curve(Flower{{0, 0}, 0.1, 0.02, 0}), std::invalid_argument);
}

TEST(MakeCurve, NormalsPointOutward) {
  for (const Shape& s : {Shape{Circle{{0.5, 0.5}, 0.25}}, Shape{Kite{{0.5, 0.5}, 0.1}},
                         Shape{Flower{{0.5, 0.5}, 0.12, 0.03, 5}}}) {
    auto c = make_curve(s);
    for (int i = 0; i < 32; ++i) {
      const double th = 2 * kPi * (i + 0.25) / 32;
      const Vec2 p = c->position(th), n = c->normal(th);
      EXPECT_NEAR(norm(n), 1.0, 1e-14);
      EXPECT_FALSE(c->contains(p + 1e-3 * n)) << describe(s);
      EXPECT_TRUE(c->contains(p - 1e-3 * n)) << describe(s);
    }
  }
}

TEST(Discretize, SquareInscribedInCircle) {
  auto c = make_curve(Circle{{0.5, 0.5}, 0.25});
  EXPECT_THROW(discretize(c, 4), std::invalid_argument);
  EXPECT_THROW(discretize(c, 7), std::invalid_argument);
  const BoundaryMesh m = discretize(c, 8);
  for (double l : m.lengths) EXPECT_NEAR(l, 2 * 0.25 * std::sin(kPi / 8), 1e-15);
}

TEST(Discretize, CircleNormalsRadialAndPerimeter) {
  auto c = make_curve(Circle{{0.5, 0.5}, 0.25});
  const BoundaryMesh m = discretize(c, 128);
  ASSERT_EQ(m.size(), 128);
  for (int s = 0; s < m.size(); ++s) {
    const Vec2 radial = (m.centers[s] - Vec2{0.5, 0.5}) / norm(m.centers[s] - Vec2{0.5, 0.5});
    EXPECT_NEAR(m.normals[s].x, radial.x, 1e-12);
    EXPECT_NEAR(m.normals[s].y, radial.y, 1e-12);
    EXPECT_GT(m.lengths[s], 0.0);
  }
  EXPECT_NEAR(m.perimeter(), 2 * 128 * 0.25 * std::sin(kPi / 128), 1e-14);
  EXPECT_LT(std::abs(m.perimeter() - 2 * kPi * 0.25) / (2 * kPi * 0.25), 1e-3);
}

TEST(Discretize, RefinementHalvesMaxLength) {
  for (const Shape& s : {Shape{Kite{{0.5, 0.5}, 0.1}}, Shape{Flower{{0.5, 0.5}, 0.12, 0.03, 5}}}) {
    auto c = make_curve(s);
    const double r = discretize(c, 64).max_length() / discretize(c, 128).max_length();
    EXPECT_NEAR(r, 2.0, 0.2) << describe(s);
    const BoundaryMesh m = discretize(c, 128);
    for (int i = 0; i < m.size(); ++i) EXPECT_GT(dot(m.normals[i], m.centers[i] - c->centroid()), 0.0);
  }
}

TEST(UniformGrid, Examples) {
  const FieldGrid g = uniform_grid({0, 0, 1, 1}, 200, 200);
  EXPECT_DOUBLE_EQ(g.dx, 0.005);
  EXPECT_DOUBLE_EQ(g.dy, 0.005);
  EXPECT_EQ(g.values.size(), 40000u);
  EXPECT_DOUBLE_EQ(uniform_grid({0, 0, 1, 1}, 100, 100).dx, 0.01);
  const FieldGrid s = uniform_grid({0, 0, 1, 1}, 2, 2);
  EXPECT_DOUBLE_EQ(s.cell_center(0, 0).x, 0.25);
  EXPECT_DOUBLE_EQ(s.cell_center(0, 0).y, 0.25);
  EXPECT_DOUBLE_EQ(s.cell_center(1, 1).x, 0.75);
  EXPECT_THROW(uniform_grid({0, 0, 0, 1}, 4, 4), std::invalid_argument);
  EXPECT_THROW(uniform_grid({0, 0, 1, 1}, 1, 4), std::invalid_argument);
}

TEST(RegionMask, BufferedDisks) {
  const FieldGrid g = uniform_grid({0, 0, 1, 1}, 200, 200);
  auto c = make_curve(Circle{{0.5, 0.5}, 0.25});
  const RegionMask inner = region_mask(g, *c, -0.05), plain = region_mask(g, *c, 0.0), outer = region_mask(g, *c, 0.05);
  EXPECT_TRUE(inner.subset_of(plain));
  EXPECT_TRUE(plain.subset_of(outer));
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double r = norm(g.cell_center(ix, iy) - Vec2{0.5, 0.5});
      if (std::abs(r - 0.2375) > 1e-4) EXPECT_EQ(inner.at(ix, iy), r < 0.2375);
      if (std::abs(r - 0.25) > 1e-4) EXPECT_EQ(plain.at(ix, iy), c->contains(g.cell_center(ix, iy)));
    }
  const RegionMask comp = outer.complement();
  EXPECT_EQ(comp.count() + outer.count(), g.cell_count());
  for (size_t i = 0; i < comp.inside.size(); ++i) EXPECT_NE(comp.inside[i], outer.inside[i]);
}

TEST(RegionMask, MonotoneInScale) {
  const FieldGrid g = uniform_grid({0, 0, 1, 1}, 120, 120);
  auto c = make_curve(Kite{{0.5, 0.5}, 0.15});
  RegionMask prev = region_mask(g, *c, -0.3);
  for (double s : {-0.1, 0.0, 0.05, 0.4}) {
    RegionMask m = region_mask(g, *c, s);
    EXPECT_TRUE(prev.subset_of(m)) << s;
    prev = m;
  }
  EXPECT_THROW(region_mask(g, *c, -1.0), std::invalid_argument);
}

TEST(Polygon, WindingAndArea) {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_DOUBLE_EQ(polygon_area(sq), 1.0);
  EXPECT_EQ(winding_number(sq, {0.5, 0.5}), 1);
  EXPECT_EQ(winding_number(sq, {1.5, 0.5}), 0);
  const std::vector<Vec2> cw(sq.rbegin(), sq.rend());
  EXPECT_DOUBLE_EQ(polygon_area(cw), -1.0);
  EXPECT_EQ(winding_number(cw, {0.5, 0.5}), -1);
}

TEST(CurveInside, Containment) {
  auto omega = make_curve(Circle{{0.5, 0.5}, 1.0 / 3.0});
  EXPECT_TRUE(curve_inside(*make_curve(Kite{{0.5, 0.5}, 0.1}), *omega, 0.01));
  EXPECT_FALSE(curve_inside(*make_curve(Kite{{0.5, 0.5}, 0.3}), *omega));
  EXPECT_FALSE(curve_inside(*make_curve(Circle{{0.5, 0.5}, 0.3}), *omega, 0.05));
}
