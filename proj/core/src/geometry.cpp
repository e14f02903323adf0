#include "heatcloak/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "heatcloak/heat_kernel.hpp"

namespace heatcloak {

namespace {

constexpr int kFine = 1024;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double l2 = norm2(ab);
  double s = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return norm(p - (a + s * ab));
}

}  // namespace

void validate_shape(const Shape& shape) {
  std::visit(Overloaded{
                 [](const Circle& c) {
                   if (!(c.radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
                 },
                 [](const Kite& k) {
                   if (!(k.scale > 0.0)) throw std::invalid_argument("kite: scale must be positive");
                 },
                 [](const Flower& f) {
                   if (!(f.mean_radius > 0.0)) throw std::invalid_argument("flower: mean radius must be positive");
                   if (f.amplitude < 0.0) throw std::invalid_argument("flower: amplitude must be nonnegative");
                   if (f.amplitude >= f.mean_radius) {
                     throw std::invalid_argument("flower: amplitude must be smaller than mean radius");
                   }
                   if (f.petals < 1) throw std::invalid_argument("flower: petal count must be >= 1");
                 },
             },
             shape);
}

std::string describe(const Shape& shape) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Circle& c) { os << "circle(" << c.center.x << ", " << c.center.y << ", " << c.radius << ")"; },
                 [&](const Kite& k) { os << "kite(" << k.center.x << ", " << k.center.y << ", " << k.scale << ")"; },
                 [&](const Flower& f) {
                   os << "flower(" << f.center.x << ", " << f.center.y << ", " << f.mean_radius << ", " << f.amplitude
                      << ", " << f.petals << ")";
                 },
             },
             shape);
  return os.str();
}

ClosedCurve::ClosedCurve(Shape shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  fine_ = polygon(kFine);
  area_ = polygon_area(fine_);
  double cx = 0.0, cy = 0.0;
  for (int i = 0; i < kFine; ++i) {
    const Vec2 a = fine_[i], b = fine_[(i + 1) % kFine];
    const double c = cross(a, b);
    cx += (a.x + b.x) * c;
    cy += (a.y + b.y) * c;
  }
  centroid_ = {cx / (6.0 * area_), cy / (6.0 * area_)};
  Vec2 lo = fine_[0], hi = fine_[0];
  for (const Vec2& p : fine_) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  bounds_ = {lo, hi};
  for (int i = 0; i < kFine; i += 4) {
    for (int j = i + 4; j < kFine; j += 4) diameter_ = std::max(diameter_, norm(fine_[i] - fine_[j]));
  }
  star_shaped_ = true;
  for (int i = 0; i < 4 * kFine; ++i) {
    const double t = 2.0 * kPi * i / (4 * kFine);
    if (cross(position(t) - centroid_, derivative(t)) <= 0.0) {
      star_shaped_ = false;
      break;
    }
  }
}

Vec2 ClosedCurve::position(double t) const {
  return std::visit(Overloaded{
                        [t](const Circle& c) { return c.center + c.radius * Vec2{std::cos(t), std::sin(t)}; },
                        [t](const Kite& k) {
                          return k.center +
                                 k.scale * Vec2{std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65, 1.5 * std::sin(t)};
                        },
                        [t](const Flower& f) {
                          const double r = f.mean_radius + f.amplitude * std::cos(f.petals * t);
                          return f.center + r * Vec2{std::cos(t), std::sin(t)};
                        },
                    },
                    shape_);
}

Vec2 ClosedCurve::derivative(double t) const {
  return std::visit(Overloaded{
                        [t](const Circle& c) { return c.radius * Vec2{-std::sin(t), std::cos(t)}; },
                        [t](const Kite& k) {
                          return k.scale * Vec2{-std::sin(t) - 1.3 * std::sin(2.0 * t), 1.5 * std::cos(t)};
                        },
                        [t](const Flower& f) {
                          const double r = f.mean_radius + f.amplitude * std::cos(f.petals * t);
                          const double dr = -f.amplitude * f.petals * std::sin(f.petals * t);
                          return dr * Vec2{std::cos(t), std::sin(t)} + r * Vec2{-std::sin(t), std::cos(t)};
                        },
                    },
                    shape_);
}

Vec2 ClosedCurve::normal(double t) const {
  const Vec2 d = derivative(t);
  return Vec2{d.y, -d.x} / norm(d);
}

std::vector<Vec2> ClosedCurve::polygon(int n) const {
  if (n < 3) throw std::invalid_argument("polygon: need at least 3 vertices");
  std::vector<Vec2> out(n);
  for (int i = 0; i < n; ++i) out[i] = position(2.0 * kPi * i / n);
  return out;
}

bool ClosedCurve::contains(Vec2 p) const { return winding_number(fine_, p) != 0; }

double ClosedCurve::distance(Vec2 p) const {
  double best = INFINITY;
  for (int i = 0; i < kFine; ++i) best = std::min(best, segment_distance(p, fine_[i], fine_[(i + 1) % kFine]));
  return best;
}

CurvePtr make_curve(const Shape& shape) {
  auto c = std::make_shared<const ClosedCurve>(shape);
  if (!(c->area() > 0.0)) throw std::invalid_argument("curve is not positively oriented");
  return c;
}

double BoundaryMesh::perimeter() const {
  double s = 0.0;
  for (double l : lengths) s += l;
  return s;
}

double BoundaryMesh::max_length() const { return *std::max_element(lengths.begin(), lengths.end()); }

BoundaryMesh discretize(const CurvePtr& curve, int n) {
  if (!curve) throw std::invalid_argument("discretize: null curve");
  if (n < 8) throw std::invalid_argument("discretize: need N >= 8 segments, got " + std::to_string(n));
  BoundaryMesh m;
  m.curve = curve;
  m.nodes.resize(n);
  m.centers.resize(n);
  m.normals.resize(n);
  m.lengths.resize(n);
  m.theta_mid.resize(n);
  const double h = 2.0 * kPi / n;
  for (int s = 0; s < n; ++s) {
    const Vec2 a = curve->position(h * s);
    const Vec2 b = curve->position(h * (s + 1));
    m.nodes[s] = a;
    m.centers[s] = 0.5 * (a + b);
    m.lengths[s] = norm(b - a);
    m.theta_mid[s] = h * (s + 0.5);
    m.normals[s] = curve->normal(m.theta_mid[s]);
  }
  return m;
}

std::vector<Vec2> FieldGrid::centers() const {
  std::vector<Vec2> out;
  out.reserve(cell_count());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) out.push_back(cell_center(ix, iy));
  return out;
}

bool FieldGrid::same_geometry(const FieldGrid& o) const {
  return nx == o.nx && ny == o.ny && dx == o.dx && dy == o.dy && origin == o.origin;
}

FieldGrid uniform_grid(const BBox& box, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("uniform_grid: need nx, ny >= 2");
  if (!(box.xmax > box.xmin) || !(box.ymax > box.ymin)) throw std::invalid_argument("uniform_grid: empty bounding box");
  FieldGrid g;
  g.origin = {box.xmin, box.ymin};
  g.nx = nx;
  g.ny = ny;
  g.dx = (box.xmax - box.xmin) / nx;
  g.dy = (box.ymax - box.ymin) / ny;
  g.values.assign(g.cell_count(), 0.0);
  return g;
}

size_t RegionMask::count() const { return static_cast<size_t>(std::count(inside.begin(), inside.end(), 1)); }

RegionMask RegionMask::complement() const {
  RegionMask c = *this;
  for (auto& v : c.inside) v = v ? 0 : 1;
  return c;
}

bool RegionMask::subset_of(const RegionMask& o) const {
  if (o.nx != nx || o.ny != ny) throw std::invalid_argument("RegionMask::subset_of: shape mismatch");
  for (size_t i = 0; i < inside.size(); ++i)
    if (inside[i] && !o.inside[i]) return false;
  return true;
}

RegionMask region_mask(const FieldGrid& grid, const ClosedCurve& curve, double scale) {
  if (!(1.0 + scale > 0.0)) throw std::invalid_argument("region_mask: 1 + scale must be positive");
  if (scale != 0.0 && !curve.star_shaped()) {
    throw std::invalid_argument("region_mask: scaled regions need a curve star-shaped about its centroid");
  }
  auto poly = curve.polygon(kFine);
  const Vec2 c = curve.centroid();
  for (Vec2& p : poly) p = c + (1.0 + scale) * (p - c);
  RegionMask m;
  m.nx = grid.nx;
  m.ny = grid.ny;
  m.inside.assign(grid.cell_count(), 0);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      m.inside[static_cast<size_t>(iy) * grid.nx + ix] = winding_number(poly, grid.cell_center(ix, iy)) != 0;
  return m;
}

int winding_number(const std::vector<Vec2>& poly, Vec2 p) {
  int wn = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const double side = cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0.0) ++wn;
    } else if (b.y <= p.y && side < 0.0) {
      --wn;
    }
  }
  return wn;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * s;
}

bool curve_inside(const ClosedCurve& inner, const ClosedCurve& outer, double margin) {
  for (const Vec2& p : inner.polygon(256)) {
    if (!outer.contains(p)) return false;
    if (margin > 0.0 && outer.distance(p) < margin) return false;
  }
  return true;
}

}  // namespace heatcloak
