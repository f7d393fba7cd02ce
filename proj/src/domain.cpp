#include "levylab/domain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"

namespace levylab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double two_pi = 2.0 * std::numbers::pi;

double norm(Point p) { return std::hypot(p[0], p[1]); }

// Closed C^2 curve gamma(theta), theta in [0, 2pi), counterclockwise.
struct Curve {
  virtual ~Curve() = default;
  virtual Point at(double t) const = 0;
  virtual Point d1(double t) const = 0;
  virtual Point d2(double t) const = 0;

  Point outward_normal(double t) const {
    const Point d = d1(t);
    const double l = norm(d);
    return {d[1] / l, -d[0] / l};
  }

  // Global minimum of |gamma - p| by sampling then Newton on (gamma - p).gamma'.
  double distance(Point p) const {
    constexpr int samples = 128;
    double best_t = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
      const double t = two_pi * k / samples;
      const Point g = at(t);
      const double d2 = (g[0] - p[0]) * (g[0] - p[0]) + (g[1] - p[1]) * (g[1] - p[1]);
      if (d2 < best) {
        best = d2;
        best_t = t;
      }
    }
    double t = best_t;
    const double max_step = two_pi / samples;
    for (int it = 0; it < 12; ++it) {
      const Point g = at(t);
      const Point a = d1(t);
      const Point b = d2(t);
      const Point r{g[0] - p[0], g[1] - p[1]};
      const double f = r[0] * a[0] + r[1] * a[1];
      const double fp = a[0] * a[0] + a[1] * a[1] + r[0] * b[0] + r[1] * b[1];
      if (fp <= 0.0) break;
      const double step = std::clamp(f / fp, -max_step, max_step);
      t -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    const Point g = at(t);
    const double d2 = (g[0] - p[0]) * (g[0] - p[0]) + (g[1] - p[1]) * (g[1] - p[1]);
    return std::sqrt(std::min(d2, best));
  }
};

struct EllipseCurve final : Curve {
  double a, b;
  EllipseCurve(double a_, double b_) : a(a_), b(b_) {}
  Point at(double t) const override { return {a * std::cos(t), b * std::sin(t)}; }
  Point d1(double t) const override { return {-a * std::sin(t), b * std::cos(t)}; }
  Point d2(double t) const override { return {-a * std::cos(t), -b * std::sin(t)}; }
};

struct EggCurve final : Curve {
  double e;
  explicit EggCurve(double e_) : e(e_) {}
  Point at(double t) const override {
    const double rho = 1.0 + e * std::cos(t);
    return {rho * std::cos(t), rho * std::sin(t)};
  }
  Point d1(double t) const override {
    const double c = std::cos(t), s = std::sin(t);
    const double rho = 1.0 + e * c, drho = -e * s;
    return {drho * c - rho * s, drho * s + rho * c};
  }
  Point d2(double t) const override {
    const double c = std::cos(t), s = std::sin(t);
    const double rho = 1.0 + e * c, drho = -e * s, ddrho = -e * c;
    return {ddrho * c - 2.0 * drho * s - rho * c, ddrho * s + 2.0 * drho * c - rho * s};
  }
};

}  // namespace

void validate_shape(const Shape& shape) {
  std::visit(overloaded{
                 [](const Ball& s) {
                   if (!(s.radius > 0.0)) throw ArgumentError("ball radius must be positive");
                 },
                 [](const Ellipse& s) {
                   if (!(s.a > 0.0 && s.b > 0.0)) throw ArgumentError("ellipse semi-axes must be positive");
                 },
                 [](const Annulus& s) {
                   if (!(s.r_in > 0.0 && s.r_out > s.r_in)) throw ArgumentError("annulus needs 0 < r_in < r_out");
                 },
                 [](const Egg& s) {
                   if (!(s.asymmetry >= 0.0 && s.asymmetry <= 0.5)) {
                     throw ArgumentError("egg asymmetry must lie in [0, 0.5]");
                   }
                 },
             },
             shape);
}

std::string shape_name(const Shape& shape) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Ball& s) { os << "Ball(" << s.radius << ")"; },
                 [&](const Ellipse& s) { os << "Ellipse(" << s.a << "," << s.b << ")"; },
                 [&](const Annulus& s) { os << "Annulus(" << s.r_in << "," << s.r_out << ")"; },
                 [&](const Egg& s) { os << "Egg(" << s.asymmetry << ")"; },
             },
             shape);
  return os.str();
}

bool contains(const Shape& shape, Point p) {
  return std::visit(overloaded{
                        [&](const Ball& s) { return p[0] * p[0] + p[1] * p[1] < s.radius * s.radius; },
                        [&](const Ellipse& s) {
                          return (p[0] / s.a) * (p[0] / s.a) + (p[1] / s.b) * (p[1] / s.b) < 1.0;
                        },
                        [&](const Annulus& s) {
                          const double r2 = p[0] * p[0] + p[1] * p[1];
                          return r2 > s.r_in * s.r_in && r2 < s.r_out * s.r_out;
                        },
                        [&](const Egg& s) {
                          const double r = norm(p);
                          if (r == 0.0) return true;
                          return r < 1.0 + s.asymmetry * p[0] / r;
                        },
                    },
                    shape);
}

double signed_distance(const Shape& shape, Point p) {
  const double unsigned_distance =
      std::visit(overloaded{
                     [&](const Ball& s) { return std::fabs(s.radius - norm(p)); },
                     [&](const Ellipse& s) { return EllipseCurve(s.a, s.b).distance(p); },
                     [&](const Annulus& s) {
                       const double r = norm(p);
                       return std::min(std::fabs(r - s.r_in), std::fabs(s.r_out - r));
                     },
                     [&](const Egg& s) { return EggCurve(s.asymmetry).distance(p); },
                 },
                 shape);
  if (contains(shape, p)) return std::max(unsigned_distance, std::numeric_limits<double>::min());
  return -unsigned_distance;
}

double diameter(const Shape& shape) {
  return std::visit(overloaded{
                        [](const Ball& s) { return 2.0 * s.radius; },
                        [](const Ellipse& s) { return 2.0 * std::max(s.a, s.b); },
                        [](const Annulus& s) { return 2.0 * s.r_out; },
                        [](const Egg& s) {
                          const EggCurve c(s.asymmetry);
                          constexpr int m = 720;
                          std::vector<Point> pts(m);
                          for (int k = 0; k < m; ++k) pts[static_cast<std::size_t>(k)] = c.at(two_pi * k / m);
                          double best = 0.0;
                          for (const auto& a : pts) {
                            for (const auto& b : pts) best = std::max(best, std::hypot(a[0] - b[0], a[1] - b[1]));
                          }
                          return best;
                        },
                    },
                    shape);
}

Point shape_center(const Shape& shape) {
  if (const auto* egg = std::get_if<Egg>(&shape)) return {egg->asymmetry, 0.0};
  return {0.0, 0.0};
}

std::vector<BoundarySample> boundary_points(const Shape& shape, int per_component) {
  if (per_component < 1) throw ArgumentError("boundary_points: need at least one point per component");
  std::vector<BoundarySample> out;
  auto circle = [&](double r, double sign, int component) {
    for (int k = 0; k < per_component; ++k) {
      const double t = two_pi * k / per_component;
      const double c = std::cos(t), s = std::sin(t);
      out.push_back({{r * c, r * s}, {sign * c, sign * s}, t, component});
    }
  };
  auto curve = [&](const Curve& cv) {
    for (int k = 0; k < per_component; ++k) {
      const double t = two_pi * k / per_component;
      out.push_back({cv.at(t), cv.outward_normal(t), t, 0});
    }
  };
  std::visit(overloaded{
                 [&](const Ball& s) { circle(s.radius, 1.0, 0); },
                 [&](const Ellipse& s) { curve(EllipseCurve(s.a, s.b)); },
                 [&](const Annulus& s) {
                   circle(s.r_out, 1.0, 0);
                   circle(s.r_in, -1.0, 1);
                 },
                 [&](const Egg& s) { curve(EggCurve(s.asymmetry)); },
             },
             shape);
  return out;
}

DomainGrid::DomainGrid(Shape shape, double h, double bbox_scale)
    : shape_(std::move(shape)), h_(h), bbox_scale_(bbox_scale) {
  validate_shape(shape_);
  if (!(h > 0.0)) throw ArgumentError("grid spacing must be positive");
  if (!(bbox_scale >= 1.0)) throw ArgumentError("bbox scale must be at least 1");
  const double half_width = 0.5 * bbox_scale * diameter(shape_);
  const int half_nodes = static_cast<int>(std::ceil(half_width / h - 1e-9));
  n_ = 2 * half_nodes + 1;
  const Point c = shape_center(shape_);
  origin_ = {c[0] - half_nodes * h, c[1] - half_nodes * h};

  const std::size_t total = size();
  inside_.assign(total, 0);
  delta_.assign(total, 0.0);
  normals_.assign(total, Point{0.0, 0.0});
  for (std::size_t k = 0; k < total; ++k) {
    const Point p = node(k);
    const double d = signed_distance(shape_, p);
    delta_[k] = d;
    if (d > 0.0) {
      inside_[k] = 1;
      interior_.push_back(k);
    }
    if (std::fabs(d) <= 2.0 * h_) {
      // outward normal = -grad(delta)
      const double e = 1e-6 * h_;
      const double gx = signed_distance(shape_, {p[0] + e, p[1]}) - signed_distance(shape_, {p[0] - e, p[1]});
      const double gy = signed_distance(shape_, {p[0], p[1] + e}) - signed_distance(shape_, {p[0], p[1] - e});
      const double l = std::hypot(gx, gy);
      if (l > 0.0) normals_[k] = {-gx / l, -gy / l};
    }
  }
  if (interior_.empty()) throw GeometryError("grid has no interior nodes; refine h");
}

bool DomainGrid::in_bbox(Point p) const {
  const double hi = (n_ - 1) * h_;
  return p[0] >= origin_[0] && p[1] >= origin_[1] && p[0] <= origin_[0] + hi && p[1] <= origin_[1] + hi;
}

Field::Field(std::shared_ptr<const DomainGrid> g, double fill) : grid(std::move(g)) {
  if (!grid) throw ArgumentError("Field needs a grid");
  values.assign(grid->size(), fill);
}

double Field::at(int i, int j) const {
  const int n = grid->n();
  if (i < 0 || j < 0 || i >= n || j >= n) return 0.0;
  return values[grid->index(i, j)];
}

double Field::interpolate(Point p) const {
  const double h = grid->h();
  const Point o = grid->origin();
  const double fx = (p[0] - o[0]) / h;
  const double fy = (p[1] - o[1]) / h;
  const int n = grid->n();
  if (fx < 0.0 || fy < 0.0 || fx > n - 1 || fy > n - 1) return 0.0;
  const int i = std::min(static_cast<int>(std::floor(fx)), n - 2);
  const int j = std::min(static_cast<int>(std::floor(fy)), n - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
         tx * ty * at(i + 1, j + 1);
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

void write_field_csv(std::ostream& os, const Field& field) {
  const auto& g = *field.grid;
  os << "x,y,u,delta\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point p = g.node(k);
    os << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(field.values[k]) << ','
       << format_double(g.delta(k)) << '\n';
  }
}

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigError("truncated field dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char field_magic[8] = {'L', 'V', 'L', 'F', 'L', 'D', '0', '1'};

}  // namespace

void write_field_binary(std::ostream& os, const Field& field) {
  const auto& g = *field.grid;
  os.write(field_magic, sizeof field_magic);
  put_le<std::uint32_t>(os, 2);
  put_le<std::uint32_t>(os, 0);
  put_le<double>(os, g.h());
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.n()));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.n()));
  put_le<double>(os, g.origin()[0]);
  put_le<double>(os, g.origin()[1]);
  for (double v : field.values) put_le<double>(os, v);
  for (double v : g.deltas()) put_le<double>(os, v);
}

FieldDump read_field_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, field_magic, sizeof magic) != 0) {
    throw ConfigError("not a field dump (bad magic)");
  }
  if (get_le<std::uint32_t>(is) != 2) throw ConfigError("field dump: unsupported dimension");
  get_le<std::uint32_t>(is);
  FieldDump d;
  d.h = get_le<double>(is);
  d.nx = get_le<std::uint64_t>(is);
  d.ny = get_le<std::uint64_t>(is);
  d.origin = {get_le<double>(is), get_le<double>(is)};
  const std::size_t count = d.nx * d.ny;
  d.values.resize(count);
  d.deltas.resize(count);
  for (auto& v : d.values) v = get_le<double>(is);
  for (auto& v : d.deltas) v = get_le<double>(is);
  return d;
}

}  // namespace levylab
