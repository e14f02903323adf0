#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "heatcloak/vec2.hpp"

namespace heatcloak {

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Scaled kite: center + scale * (cos t + 0.65 cos 2t - 0.65, 1.5 sin t).
struct Kite {
  Vec2 center;
  double scale = 0.0;
};

/// Polar flower r(t) = mean_radius + amplitude * cos(petals * t) about center.
struct Flower {
  Vec2 center;
  double mean_radius = 0.0;
  double amplitude = 0.0;
  int petals = 5;
};

using Shape = std::variant<Circle, Kite, Flower>;

std::string describe(const Shape& shape);
/// Throws std::invalid_argument for non-positive sizes or a flower amplitude >= its mean radius.
void validate_shape(const Shape& shape);

/// Counterclockwise parametric closed curve on t in [0, 2 pi).
class ClosedCurve {
 public:
  explicit ClosedCurve(Shape shape);

  const Shape& shape() const noexcept { return shape_; }
  Vec2 position(double t) const;
  Vec2 derivative(double t) const;
  double speed(double t) const { return norm(derivative(t)); }
  /// Outward unit normal (y', -x') / |gamma'|.
  Vec2 normal(double t) const;

  /// Polygon of n vertices at uniform parameters.
  std::vector<Vec2> polygon(int n) const;
  double area() const noexcept { return area_; }
  Vec2 centroid() const noexcept { return centroid_; }
  double diameter() const noexcept { return diameter_; }
  /// Axis-aligned bounding box of the fine polygon: {min, max}.
  std::pair<Vec2, Vec2> bounds() const noexcept { return bounds_; }
  /// Every ray from the centroid crosses the curve once.
  bool star_shaped() const noexcept { return star_shaped_; }

  bool contains(Vec2 p) const;
  /// Minimum distance from p to the fine polygon.
  double distance(Vec2 p) const;

 private:
  Shape shape_;
  std::vector<Vec2> fine_;
  double area_ = 0.0;
  Vec2 centroid_;
  double diameter_ = 0.0;
  std::pair<Vec2, Vec2> bounds_;
  bool star_shaped_ = false;
};

using CurvePtr = std::shared_ptr<const ClosedCurve>;

/// Validates parameters; rejects non-simple combinations such as flower amplitude >= mean radius.
CurvePtr make_curve(const Shape& shape);

/// Chord discretization: N uniform nodes, chord midpoints, chord lengths, exact normals
/// at the mid-parameter of each chord.
struct BoundaryMesh {
  std::vector<Vec2> nodes;  // chord s joins nodes[s] and nodes[(s + 1) % N]
  std::vector<Vec2> centers;
  std::vector<Vec2> normals;
  std::vector<double> lengths;
  std::vector<double> theta_mid;
  CurvePtr curve;

  int size() const noexcept { return static_cast<int>(centers.size()); }
  double perimeter() const;
  double max_length() const;
};

BoundaryMesh discretize(const CurvePtr& curve, int n);

struct BBox {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;
};

/// Cell-centered uniform grid; values are row-major by y then x.
struct FieldGrid {
  Vec2 origin;
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  std::vector<double> values;
  double time = 0.0;
  double diffusivity = 0.0;

  Vec2 cell_center(int ix, int iy) const {
    return {origin.x + (ix + 0.5) * dx, origin.y + (iy + 0.5) * dy};
  }
  double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * nx + ix]; }
  double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * nx + ix]; }
  size_t cell_count() const noexcept { return static_cast<size_t>(nx) * ny; }
  std::vector<Vec2> centers() const;
  bool same_geometry(const FieldGrid& o) const;
};

FieldGrid uniform_grid(const BBox& box, int nx, int ny);

/// Boolean per grid cell.
struct RegionMask {
  int nx = 0;
  int ny = 0;
  std::vector<unsigned char> inside;

  bool at(int ix, int iy) const { return inside[static_cast<size_t>(iy) * nx + ix] != 0; }
  size_t count() const;
  RegionMask complement() const;
  bool subset_of(const RegionMask& o) const;
};

/// Cells whose centers lie inside the curve scaled by (1 + scale) about its centroid.
RegionMask region_mask(const FieldGrid& grid, const ClosedCurve& curve, double scale);

/// Winding number of p with respect to a closed polygon.
int winding_number(const std::vector<Vec2>& poly, Vec2 p);

/// Signed shoelace area of a closed polygon.
double polygon_area(const std::vector<Vec2>& poly);

/// True when every vertex of inner lies inside outer at distance >= margin from it.
bool curve_inside(const ClosedCurve& inner, const ClosedCurve& outer, double margin = 0.0);

}  // namespace heatcloak
