#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace levylab {

using Point = std::array<double, 2>;

struct Ball {
  double radius = 1.0;
};
struct Ellipse {
  double a = 1.5;  // semi-axis along x
  double b = 1.0;  // semi-axis along y
};
struct Annulus {
  double r_in = 0.4;
  double r_out = 1.0;
};
// Limacon rho(theta) = 1 + asymmetry cos(theta); convex and C^2 for asymmetry <= 1/2.
struct Egg {
  double asymmetry = 0.3;
};

using Shape = std::variant<Ball, Ellipse, Annulus, Egg>;

void validate_shape(const Shape& shape);
std::string shape_name(const Shape& shape);

/// Open-set membership.
bool contains(const Shape& shape, Point p);
/// Distance to the boundary, positive inside and negative outside.
double signed_distance(const Shape& shape, Point p);
double diameter(const Shape& shape);
/// Center of the axis-aligned bounding box of the shape.
Point shape_center(const Shape& shape);

struct BoundarySample {
  Point point;
  Point normal;  // outward unit normal
  double angle;  // curve parameter
  int component;
};

/// `per_component` equally spaced parameter values on each boundary
/// component (two for the annulus: outer first, then inner).
std::vector<BoundarySample> boundary_points(const Shape& shape, int per_component);

/// Uniform Cartesian grid over a square bounding box centered on the shape,
/// with node (i, j) at origin + (i h, j h) and flat index j * n + i.
class DomainGrid {
public:
  DomainGrid(Shape shape, double h, double bbox_scale = 3.0);

  const Shape& shape() const { return shape_; }
  double h() const { return h_; }
  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }
  Point origin() const { return origin_; }
  double bbox_scale() const { return bbox_scale_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i); }
  Point node(int i, int j) const { return {origin_[0] + i * h_, origin_[1] + j * h_}; }
  Point node(std::size_t idx) const { return node(static_cast<int>(idx % n_), static_cast<int>(idx / n_)); }
  bool in_bbox(Point p) const;

  bool inside(std::size_t idx) const { return inside_[idx] != 0; }
  double delta(std::size_t idx) const { return delta_[idx]; }
  const std::vector<std::uint8_t>& inside_mask() const { return inside_; }
  const std::vector<double>& deltas() const { return delta_; }
  const std::vector<std::size_t>& interior() const { return interior_; }

  /// Outward unit normal at nodes within two cells of the boundary; {0, 0} elsewhere.
  Point normal(std::size_t idx) const { return normals_[idx]; }
  bool near_boundary(std::size_t idx) const { return normals_[idx][0] != 0.0 || normals_[idx][1] != 0.0; }

private:
  Shape shape_;
  double h_;
  double bbox_scale_;
  int n_;
  Point origin_;
  std::vector<std::uint8_t> inside_;
  std::vector<double> delta_;
  std::vector<Point> normals_;
  std::vector<std::size_t> interior_;
};

/// Grid values of a function on R^2: interior nodes carry the unknown,
/// exterior bbox nodes carry the prescribed exterior datum, and everything
/// beyond the bbox is taken as zero.
struct Field {
  std::shared_ptr<const DomainGrid> grid;
  std::vector<double> values;

  explicit Field(std::shared_ptr<const DomainGrid> g, double fill = 0.0);

  double& operator[](std::size_t idx) { return values[idx]; }
  double operator[](std::size_t idx) const { return values[idx]; }
  double at(int i, int j) const;
  /// Bilinear interpolation; zero outside the bbox.
  double interpolate(Point p) const;
  double max_abs() const;
};

template <class F>
Field sample_field(std::shared_ptr<const DomainGrid> grid, F&& f) {
  Field out(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) out.values[k] = f(grid->node(k));
  return out;
}

/// Columns x, y, u, delta for every bbox node.
void write_field_csv(std::ostream& os, const Field& field);

/// Binary dump, all little-endian: 8-byte magic "LVLFLD01", uint32 dims (2),
/// uint32 reserved (0), float64 h, uint64 nx, uint64 ny, float64 x0, float64 y0,
/// then nx*ny float64 values followed by nx*ny float64 deltas (x fastest).
void write_field_binary(std::ostream& os, const Field& field);

struct FieldDump {
  double h = 0.0;
  std::uint64_t nx = 0;
  std::uint64_t ny = 0;
  Point origin{};
  std::vector<double> values;
  std::vector<double> deltas;
};
FieldDump read_field_binary(std::istream& is);

}  // namespace levylab
