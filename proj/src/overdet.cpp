#include "levylab/overdet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"
#include "levylab/parallel.hpp"

namespace levylab {

std::vector<double> trace_ladder(double lo, double hi, int n) { return log_grid(lo, hi, n); }

TraceFit boundary_trace(const PointFunction& u, const Shape& shape, const RenewalFunction& V, Point p, Point eta,
                        double h, const TraceOptions& opts) {
  TraceFit fit;
  for (double t : trace_ladder(opts.t_min_cells * h, opts.t_max_cells * h, opts.ladder_points)) {
    const Point x{p[0] - t * eta[0], p[1] - t * eta[1]};
    if (!contains(shape, x)) continue;
    fit.t.push_back(t);
    fit.ratio.push_back(u(x) / V(t));
  }
  if (fit.t.size() < 4) {
    std::ostringstream os;
    os << "boundary_trace: only " << fit.t.size() << " ladder points inside the domain at (" << p[0] << ", " << p[1]
       << ")";
    throw GeometryError(os.str());
  }
  double sum = 0.0;
  for (double r : fit.ratio) sum += r;
  fit.trace = sum / static_cast<double>(fit.ratio.size());
  double ss = 0.0;
  for (double r : fit.ratio) ss += (r - fit.trace) * (r - fit.trace);
  fit.residual = std::sqrt(ss / static_cast<double>(fit.ratio.size()));
  fit.lower = *std::min_element(fit.ratio.begin(), fit.ratio.end());
  return fit;
}

TraceFit boundary_trace(const Field& u, const RenewalFunction& V, Point p, Point eta, const TraceOptions& opts) {
  return boundary_trace([&](Point x) { return u.interpolate(x); }, u.grid->shape(), V, p, eta, u.grid->h(), opts);
}

TraceProfile trace_profile(const PointFunction& u, const Shape& shape, const RenewalFunction& V, double h,
                           int per_component, const TraceOptions& opts) {
  const auto samples = boundary_points(shape, per_component);
  TraceProfile profile;
  profile.t_min = opts.t_min_cells * h;
  profile.t_max = opts.t_max_cells * h;
  profile.points.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t k) {
    const auto& s = samples[k];
    const TraceFit fit = boundary_trace(u, shape, V, s.point, s.normal, h, opts);
    profile.points[k] = {static_cast<int>(k), s.angle, s.component, s.point, s.normal, fit.trace, fit.residual,
                         fit.lower};
  });
  return profile;
}

TraceProfile trace_profile(const Field& u, const RenewalFunction& V, int per_component, const TraceOptions& opts) {
  return trace_profile([&](Point x) { return u.interpolate(x); }, u.grid->shape(), V, u.grid->h(), per_component,
                       opts);
}

TraceStats trace_constancy(const TraceProfile& profile) {
  if (profile.points.size() < 16) throw ArgumentError("trace_constancy: need at least 16 boundary points");
  TraceStats st;
  const double n = static_cast<double>(profile.points.size());
  double sum = 0.0;
  for (const auto& p : profile.points) sum += p.trace;
  st.mean = sum / n;
  double ss = 0.0;
  for (const auto& p : profile.points) ss += (p.trace - st.mean) * (p.trace - st.mean);
  st.cv = st.mean == 0.0 ? 0.0 : std::sqrt(ss / n) / std::fabs(st.mean);
  return st;
}

void write_trace_csv(std::ostream& os, const TraceProfile& profile) {
  os << "index,angle,trace,residual\n";
  for (const auto& p : profile.points) {
    os << p.index << ',' << format_double(p.angle) << ',' << format_double(p.trace) << ','
       << format_double(p.residual) << '\n';
  }
}

double hopf_probe(const PointFunction& u, const Shape& shape, const RenewalFunction& V, Point p, Point eta, double h,
                  const TraceOptions& opts) {
  return boundary_trace(u, shape, V, p, eta, h, opts).lower;
}

double hopf_probe(const Field& u, const RenewalFunction& V, Point p, Point eta, const TraceOptions& opts) {
  return boundary_trace(u, V, p, eta, opts).lower;
}

std::vector<HValue> h_curve(const JumpKernel& kernel, const RenewalFunction& V, const std::vector<double>& radii,
                            double cells_per_radius, const TraceOptions& opts) {
  for (std::size_t k = 1; k < radii.size(); ++k) {
    if (!(radii[k] > radii[k - 1])) throw ArgumentError("h_curve: radii must be increasing");
  }
  std::vector<HValue> out;
  for (double r : radii) {
    auto grid = std::make_shared<const DomainGrid>(Ball{r}, r / cells_per_radius);
    const auto op = assemble(*grid, kernel);
    const Field u = solve_linear(*op, Field(grid, 1.0), Field(grid, 0.0));
    const auto st = trace_constancy(trace_profile(u, V, 32, opts));
    out.push_back({r, st.mean, st.cv});
  }
  return out;
}

std::vector<HValue> h_curve(const BernsteinSpec& spec, const std::vector<double>& radii, double cells_per_radius) {
  return h_curve(JumpKernel(spec, 2), RenewalFunction(spec), radii, cells_per_radius);
}

Point reflect(Point x, Point e, double lambda) {
  const double s = 2.0 * (x[0] * e[0] + x[1] * e[1] - lambda);
  return {x[0] - s * e[0], x[1] - s * e[1]};
}

double snap_plane(const DomainGrid& grid, Point e, double target) {
  const Point c = shape_center(grid.shape());
  const double offset = c[0] * e[0] + c[1] * e[1];
  const double h = grid.h();
  const double ax = std::fabs(e[0]), ay = std::fabs(e[1]);
  double unit;
  if ((ax == 1.0 && ay == 0.0) || (ax == 0.0 && ay == 1.0)) {
    unit = 0.5 * h;
  } else if (std::fabs(ax - std::sqrt(0.5)) < 1e-15 && std::fabs(ay - std::sqrt(0.5)) < 1e-15) {
    unit = h * std::sqrt(0.5);
  } else {
    throw ArgumentError("snap_plane: direction is not a lattice axis or diagonal");
  }
  return offset + std::round((target - offset) / unit) * unit;
}

std::vector<Point> lattice_directions() {
  const double d = std::sqrt(0.5);
  return {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}, {d, d}, {-d, -d}, {d, -d}, {-d, d}};
}

double critical_plane(const Shape& shape, Point e, int boundary_samples) {
  std::vector<Point> pts;
  for (const auto& b : boundary_points(shape, boundary_samples)) pts.push_back(b.point);
  double top = -std::numeric_limits<double>::infinity();
  double bottom = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    top = std::max(top, p[0] * e[0] + p[1] * e[1]);
    bottom = std::min(bottom, p[0] * e[0] + p[1] * e[1]);
  }
  const double tol = 1e-9 * diameter(shape);
  auto leaves = [&](double lambda) {
    for (const auto& p : pts) {
      if (p[0] * e[0] + p[1] * e[1] <= lambda) continue;
      if (signed_distance(shape, reflect(p, e, lambda)) < -tol) return true;
    }
    return false;
  };
  const int steps = 400;
  const double step = (top - bottom) / steps;
  double ok = top;
  for (int k = 1; k <= steps; ++k) {
    const double lambda = top - k * step;
    if (leaves(lambda)) {
      double bad = lambda;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (ok + bad);
        (leaves(mid) ? bad : ok) = mid;
      }
      return ok;
    }
    ok = lambda;
  }
  return bottom;
}

PlaneScan moving_plane_scan(const Field& u, Point e, const std::vector<double>& lambdas) {
  const auto& grid = *u.grid;
  const double len = std::hypot(e[0], e[1]);
  if (!(std::fabs(len - 1.0) < 1e-12)) throw ArgumentError("moving_plane_scan: direction must be a unit vector");
  PlaneScan scan;
  scan.e = e;
  scan.critical_lambda = critical_plane(grid.shape(), e);
  scan.planes.resize(lambdas.size());
  const double eps = 1e-9 * grid.h();
  parallel_for(lambdas.size(), [&](std::size_t q) {
    const double lambda = lambdas[q];
    PlaneResult res;
    res.lambda = lambda;
    res.past_critical = lambda < scan.critical_lambda - eps;
    res.min_v = std::numeric_limits<double>::infinity();
    res.max_v = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Point x = grid.node(k);
      if (x[0] * e[0] + x[1] * e[1] >= lambda - eps) continue;
      const Point rx = reflect(x, e, lambda);
      if (!contains(grid.shape(), rx)) continue;
      if (!grid.in_bbox(rx)) {
        std::ostringstream os;
        os << "moving_plane_scan: reflection across lambda = " << lambda << " leaves the bounding box";
        throw GeometryError(os.str());
      }
      const double v = u.values[k] - u.interpolate(rx);
      res.min_v = std::min(res.min_v, v);
      res.max_v = std::max(res.max_v, v);
      ++res.nodes;
    }
    if (res.nodes == 0) res.min_v = res.max_v = 0.0;
    scan.planes[q] = res;
  });
  return scan;
}

std::vector<RadialBin> radial_profile(const Field& u, Point center, double r_skip, double bin_cells) {
  const auto& grid = *u.grid;
  const double width = bin_cells * grid.h();
  std::vector<double> sum, count;
  for (std::size_t k : grid.interior()) {
    const Point x = grid.node(k);
    const double r = std::hypot(x[0] - center[0], x[1] - center[1]);
    if (r <= r_skip) continue;
    const auto b = static_cast<std::size_t>((r - r_skip) / width);
    if (b >= sum.size()) {
      sum.resize(b + 1, 0.0);
      count.resize(b + 1, 0.0);
    }
    sum[b] += u.values[k];
    count[b] += 1.0;
  }
  std::vector<RadialBin> bins;
  for (std::size_t b = 0; b < sum.size(); ++b) {
    if (count[b] > 0.0) {
      bins.push_back({r_skip + (static_cast<double>(b) + 0.5) * width, sum[b] / count[b],
                      static_cast<std::size_t>(count[b])});
    }
  }
  return bins;
}

RadialVerdict radial_monotonicity(const Field& u, Point center, double r_skip, double bin_cells) {
  const auto bins = radial_profile(u, center, r_skip, bin_cells);
  RadialVerdict v;
  v.bins = bins.size();
  if (bins.size() < 2) return v;
  v.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 1; b < bins.size(); ++b) v.worst_violation = std::max(v.worst_violation, bins[b].mean - bins[b - 1].mean);
  v.pass = v.worst_violation < 0.0;
  return v;
}

DiagonalDecay diagonal_decay_probe(const PointFunction& v, const RenewalFunction& V, Point corner, Point direction,
                                   double h, const TraceOptions& opts) {
  DiagonalDecay out;
  out.t = trace_ladder(opts.t_min_cells * h, opts.t_max_cells * h, opts.ladder_points);
  std::vector<double> values;
  double biggest = 0.0;
  for (double t : out.t) {
    const double val = v({corner[0] + t * direction[0], corner[1] + t * direction[1]});
    values.push_back(val);
    biggest = std::max(biggest, std::fabs(val));
    out.ratio.push_back(val / (V(t) * t));
  }
  if (biggest <= 1e-10) {
    out.identically_zero = true;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t k = 0; k < out.t.size(); ++k) {
    if (values[k] == 0.0) continue;
    const double x = std::log(V(out.t[k]) * out.t[k]);
    const double y = std::log(std::fabs(values[k]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1.0;
  }
  if (m >= 2.0) out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

DiagonalDecay diagonal_decay_probe(const Field& v, const RenewalFunction& V, Point corner, Point direction,
                                   const TraceOptions& opts) {
  return diagonal_decay_probe([&](Point x) { return v.interpolate(x); }, V, corner, direction, v.grid->h(), opts);
}

nlohmann::json to_json(const RigidityReport& report) {
  nlohmann::json j;
  j["shape"] = report.shape;
  j["trace_mean"] = report.trace_mean;
  j["trace_cv"] = report.trace_cv;
  if (report.h_value) {
    j["h_value"] = *report.h_value;
  } else {
    j["h_value"] = "not-applicable";
  }
  if (report.moving_plane.empty()) {
    j["moving_plane"] = "not-applicable";
  } else {
    auto arr = nlohmann::json::array();
    for (const auto& d : report.moving_plane) arr.push_back({{"direction", {d.e[0], d.e[1]}}, {"min_v", d.min_v}});
    j["moving_plane"] = arr;
  }
  if (report.radial) {
    j["radial_monotonicity"] = {{"pass", report.radial->pass},
                                {"worst_violation", report.radial->worst_violation},
                                {"bins", report.radial->bins}};
  } else {
    j["radial_monotonicity"] = "not-applicable";
  }
  return j;
}

}  // namespace levylab
