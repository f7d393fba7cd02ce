#include "levylab/experiments.hpp"

#include <boost/version.hpp>
#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"
#include "levylab/kernel.hpp"
#include "levylab/montecarlo.hpp"
#include "levylab/overdet.hpp"
#include "levylab/parallel.hpp"
#include "levylab/renewal.hpp"
#include "levylab/solver.hpp"

namespace levylab {

namespace {

using nlohmann::json;

// ---- shared pieces -----------------------------------------------------------

struct Solved {
  std::shared_ptr<const DomainGrid> grid;
  std::unique_ptr<OperatorMatrix> op;
  Field u;
  SolveStats stats;
};

// Psi(-Delta) u = 1 in D, u = 0 outside.
Solved torsion(const ExperimentConfig& cfg, const JumpKernel& kernel) {
  auto grid = std::make_shared<const DomainGrid>(cfg.shape, cfg.h, cfg.bbox_scale);
  auto op = assemble(*grid, kernel);
  SolveStats stats;
  Field u = solve_linear(*op, Field(grid, 1.0), Field(grid, 0.0), {}, &stats);
  return {grid, std::move(op), std::move(u), std::move(stats)};
}

// Closed-form torsion function of Ball(r) for Stable(a) in d = 2.
std::optional<double> torsion_oracle(const ExperimentConfig& cfg, Point x) {
  const auto* s = std::get_if<Stable>(&cfg.spec.family);
  const auto* b = std::get_if<Ball>(&cfg.shape);
  if (!s || !b) return std::nullopt;
  const double rho2 = b->radius * b->radius - x[0] * x[0] - x[1] * x[1];
  if (rho2 <= 0.0) return 0.0;
  const double a = s->alpha;
  return std::pow(rho2, a) / (std::pow(4.0, a) * std::tgamma(1.0 + a) * std::tgamma(1.0 + a));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json("not-applicable"); }

json point_json(Point p) { return json::array({p[0], p[1]}); }

json solve_json(const SolveStats& s) { return {{"iterations", s.iterations}, {"relative_residual", s.residual}}; }

template <class F>
std::string to_text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

void add_field(Artifacts& out, const ExperimentConfig& cfg, const Field& u, const std::string& stem = "field") {
  if (!cfg.write_field) return;
  out.files.emplace_back(stem + ".csv", to_text([&](std::ostream& os) { write_field_csv(os, u); }));
  out.files.emplace_back(stem + ".bin", to_text([&](std::ostream& os) { write_field_binary(os, u); }));
}

// A point where paths and probes start: the shape center when it lies inside,
// otherwise halfway across the annulus.
Point probe_point(const Shape& shape) {
  const Point c = shape_center(shape);
  if (contains(shape, c)) return c;
  const auto& a = std::get<Annulus>(shape);
  return {c[0] + 0.5 * (a.r_in + a.r_out), c[1]};
}

std::string shape_kind(const Shape& shape) {
  switch (shape.index()) {
    case 0: return "ball";
    case 1: return "ellipse";
    case 2: return "annulus";
    default: return "egg";
  }
}

TraceStats add_trace(Artifacts& out, const ExperimentConfig& cfg, const Field& u, const RenewalFunction& V,
                     json& report) {
  const auto profile = trace_profile(u, V, cfg.boundary_points);
  const auto stats = trace_constancy(profile);
  double lower = std::numeric_limits<double>::infinity();
  double worst_fit = 0.0;
  for (const auto& p : profile.points) {
    lower = std::min(lower, p.lower);
    worst_fit = std::max(worst_fit, p.residual);
  }
  report["trace"] = {{"points", profile.points.size()},
                     {"fit_window", {profile.t_min, profile.t_max}},
                     {"mean", stats.mean},
                     {"cv", stats.cv},
                     {"hopf_lower_bound", lower},
                     {"worst_fit_residual", worst_fit}};
  out.files.emplace_back("trace.csv", to_text([&](std::ostream& os) { write_trace_csv(os, profile); }));
  return stats;
}

// ---- experiments ---------------------------------------------------------------

Artifacts symbol_check(const ExperimentConfig& cfg) {
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  const std::vector<Point> xis{{1.0, 0.0}, {0.0, 2.0}, {0.6, 0.8}, {std::sqrt(2.0), std::sqrt(2.0)}, {2.4, 3.2}, {4.0, 0.0}};
  std::ostringstream csv;
  csv << "h,xi1,xi2,psi,discrete_symbol,rel_error,applied_rel_error\n";
  json levels = json::array();
  std::vector<double> worst;
  for (double h : {cfg.h, 0.5 * cfg.h}) {
    auto grid = std::make_shared<const DomainGrid>(cfg.shape, h, cfg.bbox_scale);
    const auto op = assemble(*grid, kernel);
    double w = 0.0, w_applied = 0.0;
    for (Point xi : xis) {
      const double psi = eval_psi(cfg.spec, xi[0] * xi[0] + xi[1] * xi[1]);
      const double sym = op->discrete_symbol(xi);
      const double rel = std::fabs(sym / psi - 1.0);
      // the same identity on the grid: L cos(xi . x) against psi cos(xi . x)
      const Field c = sample_field(grid, [&](Point p) { return std::cos(xi[0] * p[0] + xi[1] * p[1]); });
      const Field lc = apply(*op, c, FarField::cosine(xi));
      double applied = 0.0;
      for (std::size_t k : grid->interior()) applied = std::max(applied, std::fabs(lc.values[k] - psi * c.values[k]));
      applied /= psi;
      w = std::max(w, rel);
      w_applied = std::max(w_applied, applied);
      csv << format_double(h) << ',' << format_double(xi[0]) << ',' << format_double(xi[1]) << ','
          << format_double(psi) << ',' << format_double(sym) << ',' << format_double(rel) << ','
          << format_double(applied) << '\n';
    }
    worst.push_back(std::max(w, w_applied));
    levels.push_back({{"h", h},
                      {"max_rel_symbol_error", w},
                      {"max_rel_applied_error", w_applied},
                      {"m_matrix", check_m_matrix(*op).pass}});
  }
  out.report["levels"] = levels;
  out.report["max_rel_error"] = worst.front();
  out.report["improves_under_refinement"] = worst.back() < worst.front();
  out.report["pass"] = worst.front() <= 1e-2 && worst.back() < worst.front();
  out.files.emplace_back("symbol.csv", csv.str());
  return out;
}

Artifacts kernel_audit(const ExperimentConfig& cfg) {
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  KernelTableOptions fine;
  fine.points_per_decade *= 2;
  const JumpKernel refined(cfg.spec, 2, fine);
  const double slope = fitted_loglog_slope(kernel, 0.01, 100.0);
  json slope_j = {{"fitted", slope}, {"window", {0.01, 100.0}}};
  bool pass = true;
  if (const auto* s = std::get_if<Stable>(&cfg.spec.family)) {
    const double expected = -(2.0 + 2.0 * s->alpha);
    slope_j["expected"] = expected;
    slope_j["pass"] = std::fabs(slope - expected) <= 1e-2;
    pass = pass && std::fabs(slope - expected) <= 1e-2;
  } else {
    slope_j["expected"] = "not-applicable";
  }
  out.report["slope"] = slope_j;
  const auto a = check_kernel_bounds(kernel);
  const auto b = check_kernel_bounds(refined);
  auto bounds_json = [](const KernelBoundsReport& r, int ppd) {
    return json{{"points_per_decade", ppd}, {"b2", r.b2_fitted}, {"b2_argmax", r.b2_argmax},
                {"C", r.C_fitted},          {"C_argmax", r.C_argmax}, {"pass", r.pass}};
  };
  const double drift = std::max(std::fabs(b.b2_fitted / a.b2_fitted - 1.0), std::fabs(b.C_fitted / a.C_fitted - 1.0));
  out.report["bounds"] = {bounds_json(a, kernel.points_per_decade()), bounds_json(b, refined.points_per_decade())};
  out.report["refinement_drift"] = drift;
  out.report["origin_exponent"] = kernel.origin_exponent();
  out.report["tail_exponent"] = kernel.tail_exponent();
  pass = pass && a.pass && b.pass && std::isfinite(a.b2_fitted) && std::isfinite(a.C_fitted) && drift < 1e-3;
  out.report["pass"] = pass;
  out.files.emplace_back("kernel.csv", to_text([&](std::ostream& os) { kernel.write_csv(os); }));
  return out;
}

Artifacts renewal_audit(const ExperimentConfig& cfg) {
  Artifacts out;
  const auto* s = std::get_if<Stable>(&cfg.spec.family);
  std::ostringstream csv;
  csv << "x,ladder_exponent,V_inverted,V_reference\n";
  json rows = json::array();
  double worst_ladder = 0.0, worst_V = 0.0;
  for (double x : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double lad = ladder_exponent(cfg.spec, x);
    const double inv = renewal_V_laplace(cfg.spec, x);
    json row = {{"x", x}, {"ladder_exponent", lad}, {"V_inverted", inv}};
    double ref_V = std::numeric_limits<double>::quiet_NaN();
    if (s) {
      const double xa = std::pow(x, s->alpha);
      ref_V = xa / std::tgamma(1.0 + s->alpha);
      const double e_lad = std::fabs(lad - xa) / xa;
      const double e_V = std::fabs(inv - ref_V) / (1.0 + xa);
      row["ladder_rel_error"] = e_lad;
      row["V_scaled_error"] = e_V;
      worst_ladder = std::max(worst_ladder, e_lad);
      worst_V = std::max(worst_V, e_V);
    }
    rows.push_back(row);
    csv << format_double(x) << ',' << format_double(lad) << ',' << format_double(inv) << ','
        << (s ? format_double(ref_V) : std::string("")) << '\n';
  }
  out.report["samples"] = rows;
  const RenewalFunction V(cfg.spec);
  out.report["method"] = V.method() == RenewalMethod::StableClosedForm ? "closed-form" : "laplace-inversion";
  out.report["comparison_constant"] = V.comparison_constant();
  if (s) {
    out.report["max_ladder_rel_error"] = worst_ladder;
    out.report["max_V_scaled_error"] = worst_V;
    out.report["pass"] = worst_ladder <= 1e-4 && worst_V <= 1e-6;
  } else {
    out.report["pass"] = std::isfinite(V.comparison_constant());
  }
  out.files.emplace_back("ladder.csv", csv.str());
  out.files.emplace_back("renewal.csv", to_text([&](std::ostream& os) { V.write_csv(os); }));
  return out;
}

Artifacts torsion_run(const ExperimentConfig& cfg) {
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  const auto t = torsion(cfg, kernel);
  const Point x0 = probe_point(cfg.shape);
  const double u0 = t.u.interpolate(x0);
  const auto oracle = torsion_oracle(cfg, x0);
  out.report["probe_point"] = point_json(x0);
  out.report["solve"] = solve_json(t.stats);
  out.report["m_matrix"] = check_m_matrix(*t.op).pass;
  out.report["deterministic"] = {{"u", u0},
                                 {"oracle", optional_json(oracle)},
                                 {"rel_error", oracle ? json(std::fabs(u0 / *oracle - 1.0)) : json("not-applicable")},
                                 {"max_u", t.u.max_abs()}};
  bool pass = !oracle || std::fabs(u0 / *oracle - 1.0) <= 0.02;
  if (cfg.mc_enabled) {
    const auto samples = mc_exit(cfg.spec, cfg.shape, x0, [](Point) { return 1.0; }, cfg.mc);
    const auto est = summarize_integral(samples);
    const double target = oracle ? *oracle : u0;
    const double z = est.stderr_ > 0.0 ? (est.mean - target) / est.stderr_ : 0.0;
    out.report["montecarlo"] = {{"mean", est.mean},
                                {"stderr", est.stderr_},
                                {"n_paths", est.n},
                                {"dt", cfg.mc.dt},
                                {"seed", cfg.mc.seed},
                                {"censored_fraction", est.censored_fraction},
                                {"reference", oracle ? "oracle" : "deterministic"},
                                {"z_score", z}};
    pass = pass && std::fabs(z) <= 3.0 && est.censored_fraction < 1e-3;
    if (cfg.mc_samples_csv) {
      out.files.emplace_back("samples.csv", to_text([&](std::ostream& os) { write_samples_csv(os, samples); }));
    }
  } else {
    out.report["montecarlo"] = "disabled";
  }
  out.report["pass"] = pass;

  std::ostringstream profile;
  profile << "x,y,u,oracle\n";
  const auto& g = *t.grid;
  const int mid = g.n() / 2;
  for (int i = 0; i < g.n(); ++i) {
    const Point p = g.node(i, mid);
    const auto o = torsion_oracle(cfg, p);
    profile << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(t.u.at(i, mid)) << ','
            << (o ? format_double(*o) : std::string("")) << '\n';
  }
  out.files.emplace_back("profile.csv", profile.str());
  add_field(out, cfg, t.u);
  return out;
}

Artifacts trace_run(const ExperimentConfig& cfg) {
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  const RenewalFunction V(cfg.spec);
  const auto t = torsion(cfg, kernel);
  out.report["solve"] = solve_json(t.stats);
  const auto stats = add_trace(out, cfg, t.u, V, out.report);
  RigidityReport rr;
  rr.shape = shape_name(cfg.shape);
  rr.trace_mean = stats.mean;
  rr.trace_cv = stats.cv;
  if (std::holds_alternative<Ball>(cfg.shape)) {
    rr.h_value = stats.mean;
    rr.radial = radial_monotonicity(t.u, shape_center(cfg.shape));
  }
  out.report["rigidity"] = to_json(rr);
  out.report["ball_cv_threshold"] = 0.05;
  out.report["pass"] = !std::holds_alternative<Ball>(cfg.shape) || stats.cv <= 0.05;
  add_field(out, cfg, t.u);
  return out;
}

Artifacts h_curve_run(const ExperimentConfig& cfg) {
  Artifacts out;
  const auto values = h_curve(cfg.spec, cfg.radii, cfg.cells_per_radius);
  std::ostringstream csv;
  csv << "r,H,cv\n";
  json rows = json::array();
  bool increasing = true;
  for (std::size_t k = 0; k < values.size(); ++k) {
    rows.push_back({{"r", values[k].r}, {"H", values[k].H}, {"cv", values[k].cv}});
    csv << format_double(values[k].r) << ',' << format_double(values[k].H) << ',' << format_double(values[k].cv)
        << '\n';
    if (k > 0 && values[k].r > values[k - 1].r && !(values[k].H > values[k - 1].H)) increasing = false;
  }
  out.report["values"] = rows;
  out.report["cells_per_radius"] = cfg.cells_per_radius;
  out.report["strictly_increasing"] = increasing;
  bool pass = increasing;
  if (const auto* s = std::get_if<Stable>(&cfg.spec.family)) {
    const double expected = std::pow(2.0, s->alpha);
    json doubling = json::array();
    for (const auto& a : values) {
      for (const auto& b : values) {
        if (std::fabs(b.r - 2.0 * a.r) > 1e-12 * b.r) continue;
        const double ratio = b.H / a.H;
        const bool ok = std::fabs(ratio / expected - 1.0) <= 0.1;
        doubling.push_back({{"r", a.r}, {"ratio", ratio}, {"expected", expected}, {"pass", ok}});
        pass = pass && ok;
      }
    }
    out.report["doubling"] = doubling;
  } else {
    out.report["doubling"] = "not-applicable";
  }
  out.report["pass"] = pass;
  out.files.emplace_back("hcurve.csv", csv.str());
  return out;
}

Artifacts moving_plane_run(const ExperimentConfig& cfg) {
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  const RenewalFunction V(cfg.spec);
  const auto t = torsion(cfg, kernel);
  const auto& g = *t.grid;
  const double norm = t.u.max_abs();
  const Point c = shape_center(cfg.shape);
  const bool ball = std::holds_alternative<Ball>(cfg.shape);

  std::ostringstream csv;
  csv << "direction,e1,e2,lambda,min_v,max_v,nodes,past_critical\n";
  RigidityReport rr;
  rr.shape = shape_name(cfg.shape);
  json dirs = json::array();
  double worst_before = std::numeric_limits<double>::infinity();
  double worst_past = std::numeric_limits<double>::infinity();
  double center_sup = 0.0;
  const auto directions = lattice_directions();
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const Point e = directions[d];
    const double mid = c[0] * e[0] + c[1] * e[1];
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& b : boundary_points(cfg.shape, 4096)) top = std::max(top, b.point[0] * e[0] + b.point[1] * e[1]);
    const double crit = critical_plane(cfg.shape, e);
    // planes from the center plane towards the support line, then two past the critical position
    std::vector<double> lambdas;
    for (int k = 0; k < cfg.planes; ++k) lambdas.push_back(snap_plane(g, e, mid + (top - mid) * k / cfg.planes));
    for (int k = 1; k <= 2; ++k) lambdas.push_back(snap_plane(g, e, crit - 0.1 * k * (top - crit)));
    const auto scan = moving_plane_scan(t.u, e, lambdas);
    double dir_min = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < scan.planes.size(); ++q) {
      const auto& p = scan.planes[q];
      csv << d << ',' << format_double(e[0]) << ',' << format_double(e[1]) << ',' << format_double(p.lambda) << ','
          << format_double(p.min_v) << ',' << format_double(p.max_v) << ',' << p.nodes << ','
          << (p.past_critical ? 1 : 0) << '\n';
      if (p.past_critical) {
        worst_past = std::min(worst_past, p.min_v / norm);
      } else {
        dir_min = std::min(dir_min, p.min_v / norm);
      }
    }
    const auto& centre = scan.planes.front();
    const double sup = std::max(std::fabs(centre.min_v), std::fabs(centre.max_v)) / norm;
    center_sup = std::max(center_sup, sup);
    worst_before = std::min(worst_before, dir_min);
    rr.moving_plane.push_back({e, dir_min});
    dirs.push_back({{"direction", point_json(e)},
                    {"critical_lambda", crit},
                    {"min_v_relative", dir_min},
                    {"center_plane_sup_relative", sup}});
  }
  const auto stats = add_trace(out, cfg, t.u, V, out.report);
  rr.trace_mean = stats.mean;
  rr.trace_cv = stats.cv;
  if (ball) {
    rr.h_value = stats.mean;
    rr.radial = radial_monotonicity(t.u, c);
  }
  out.report["solve"] = solve_json(t.stats);
  out.report["directions"] = dirs;
  out.report["min_v_relative"] = worst_before;
  out.report["past_critical_min_v_relative"] = worst_past;
  out.report["center_plane_sup_relative"] = center_sup;
  out.report["asymmetry_detected"] = worst_past < -0.1;
  out.report["rigidity"] = to_json(rr);
  out.report["pass"] = worst_before >= -5e-3 && (!ball || center_sup <= 1e-3);
  out.files.emplace_back("planes.csv", csv.str());
  add_field(out, cfg, t.u);
  return out;
}

Field hole_data(std::shared_ptr<const DomainGrid> grid, const Annulus& a, Point c, double value) {
  return sample_field(grid, [&](Point p) { return std::hypot(p[0] - c[0], p[1] - c[1]) <= a.r_in ? value : 0.0; });
}

std::string radial_csv(const std::vector<RadialBin>& bins) {
  std::ostringstream os;
  os << "r,mean,count\n";
  for (const auto& b : bins) os << format_double(b.r) << ',' << format_double(b.mean) << ',' << b.count << '\n';
  return os.str();
}

// Per ray: largest increase of u between consecutive samples r_in + k h along the ray.
double worst_ray_increase(const Field& u, Point c, double r_in, double r_out, int rays) {
  const double h = u.grid->h();
  double worst = -std::numeric_limits<double>::infinity();
  for (int q = 0; q < rays; ++q) {
    const double th = 2.0 * std::numbers::pi * q / rays;
    double prev = std::numeric_limits<double>::infinity();
    for (double r = r_in + h; r < r_out - h; r += h) {
      const double v = u.interpolate({c[0] + r * std::cos(th), c[1] + r * std::sin(th)});
      if (std::isfinite(prev)) worst = std::max(worst, v - prev);
      prev = v;
    }
  }
  return worst;
}

Artifacts annulus_run(const ExperimentConfig& cfg) {
  const auto* a = std::get_if<Annulus>(&cfg.shape);
  if (!a) throw ConfigError("experiment 'annulus' needs [domain] shape = annulus");
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  auto grid = std::make_shared<const DomainGrid>(cfg.shape, cfg.h, cfg.bbox_scale);
  const auto op = assemble(*grid, kernel);
  const Point c = shape_center(cfg.shape);
  SolveStats stats;
  const Field u = solve_linear(*op, Field(grid, cfg.source), hole_data(grid, *a, c, cfg.inner_value), {}, &stats);
  const auto bins = radial_profile(u, c, a->r_in);
  const auto verdict = radial_monotonicity(u, c, a->r_in);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k : grid->interior()) {
    lo = std::min(lo, u.values[k]);
    hi = std::max(hi, u.values[k]);
  }
  out.report["solve"] = solve_json(stats);
  out.report["inner_value"] = cfg.inner_value;
  out.report["source"] = cfg.source;
  out.report["radial_monotonicity"] = {
      {"pass", verdict.pass}, {"worst_violation", verdict.worst_violation}, {"bins", verdict.bins}};
  out.report["worst_ray_increase"] = worst_ray_increase(u, c, a->r_in, a->r_out, cfg.boundary_points);
  out.report["interior_range"] = {lo, hi};
  out.report["pass"] = verdict.pass;
  out.files.emplace_back("radial.csv", radial_csv(bins));
  add_field(out, cfg, u);
  return out;
}

Artifacts semilinear_run(const ExperimentConfig& cfg) {
  Artifacts out;
  const JumpKernel kernel(cfg.spec, 2);
  const RenewalFunction V(cfg.spec);
  auto grid = std::make_shared<const DomainGrid>(cfg.shape, cfg.h, cfg.bbox_scale);
  const auto op = assemble(*grid, kernel);
  const Point c = shape_center(cfg.shape);
  const Field g = std::holds_alternative<Annulus>(cfg.shape)
                      ? hole_data(grid, std::get<Annulus>(cfg.shape), c, cfg.inner_value)
                      : Field(grid, 0.0);
  const double c0 = cfg.c0, c1 = cfg.c1;
  const std::function<double(double)> f = [c0, c1](double v) { return c0 + c1 * v; };
  SemilinearOptions opts;
  opts.omega = cfg.omega;
  SemilinearStats stats;
  const Field u = solve_semilinear(*op, f, g, opts, &stats);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k : grid->interior()) {
    lo = std::min(lo, u.values[k]);
    hi = std::max(hi, u.values[k]);
  }
  out.report["nonlinearity"] = {{"c0", c0}, {"c1", c1}, {"omega", cfg.omega}};
  out.report["picard"] = {{"iterations", stats.iterations},
                          {"last_change", stats.last_change},
                          {"linear_iterations", stats.linear_iterations}};
  out.report["residual_sup"] = semilinear_residual(*op, u, f);
  out.report["interior_range"] = {lo, hi};
  out.report["positive"] = lo > 0.0;
  const auto ts = add_trace(out, cfg, u, V, out.report);
  RigidityReport rr;
  rr.shape = shape_name(cfg.shape);
  rr.trace_mean = ts.mean;
  rr.trace_cv = ts.cv;
  if (std::holds_alternative<Ball>(cfg.shape)) {
    rr.h_value = ts.mean;
    rr.radial = radial_monotonicity(u, c);
    out.files.emplace_back("radial.csv", radial_csv(radial_profile(u, c)));
  } else if (const auto* a = std::get_if<Annulus>(&cfg.shape)) {
    rr.radial = radial_monotonicity(u, c, a->r_in);
    out.files.emplace_back("radial.csv", radial_csv(radial_profile(u, c, a->r_in)));
  }
  out.report["rigidity"] = to_json(rr);
  out.report["pass"] = stats.last_change <= opts.tolerance && (!rr.radial || rr.radial->pass);
  add_field(out, cfg, u);
  return out;
}

struct Entry {
  const char* description;
  Artifacts (*run)(const ExperimentConfig&);
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r{
      {"symbol-check", {"discrete operator on cos(xi . x) against Psi(|xi|^2), at h and h/2", symbol_check}},
      {"kernel-audit", {"jump-kernel log-log slope and two-sided bounds, with table refinement", kernel_audit}},
      {"renewal-audit", {"ladder exponent and renewal function against closed forms", renewal_audit}},
      {"torsion", {"torsion function by the grid solver and by Monte Carlo exit times", torsion_run}},
      {"trace", {"boundary trace u / V(delta) of the torsion function and its constancy", trace_run}},
      {"h-curve", {"mean torsion trace H_r on balls of increasing radius", h_curve_run}},
      {"moving-plane", {"reflected differences of the torsion function over lattice directions", moving_plane_run}},
      {"annulus", {"u = A on the hole, zero outside: radial monotonicity across the annulus", annulus_run}},
      {"semilinear", {"Picard solve of Psi(-Delta) u = c0 + c1 u and its trace and symmetry", semilinear_run}},
  };
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

const char* version() { return "0.1.0"; }

std::string describe_experiments() {
  std::ostringstream os;
  for (const auto& id : experiment_ids()) os << std::left << std::setw(15) << id << registry().at(id).description << '\n';
  return os.str();
}

Artifacts run_experiment(const ExperimentConfig& cfg) {
  const auto it = registry().find(cfg.experiment);
  if (it == registry().end()) throw ConfigError("unknown experiment id '" + cfg.experiment + "'");
  Artifacts out = it->second.run(cfg);
  json head = {{"experiment", cfg.experiment},
               {"bernstein", cfg.spec.name()},
               {"shape", shape_name(cfg.shape)},
               {"shape_kind", shape_kind(cfg.shape)},
               {"h", cfg.h},
               {"seed", cfg.mc.seed}};
  head.update(out.report);
  out.report = std::move(head);
  return out;
}

RunSummary run(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  const auto started = utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  const Artifacts art = run_experiment(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunSummary summary;
  summary.dir = dir;
  summary.wall_seconds = wall;
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.json", art.report.dump(2) + "\n");
  summary.files.push_back("report.json");
  for (const auto& [name, contents] : art.files) {
    write_text_file(dir / name, contents);
    summary.files.push_back(name);
  }

  std::ostringstream m;
  m << "levylab " << version() << '\n';
  m << "experiment: " << cfg.experiment << '\n';
  m << "seed: " << cfg.mc.seed << '\n';
  m << "started_utc: " << started << '\n';
  m << "wall_seconds: " << std::fixed << std::setprecision(3) << wall << '\n';
  m << "threads: " << thread_count() << '\n';
  m << "compiler: " << __VERSION__ << '\n';
  m << "boost: " << BOOST_LIB_VERSION << '\n';
  m << "fftw: " << fftw_version << '\n';
  m << "files:";
  for (const auto& f : summary.files) m << ' ' << f;
  m << "\n\n# configuration\n" << config_echo(cfg);
  write_text_file(dir / "manifest.txt", m.str());
  summary.files.push_back("manifest.txt");
  return summary;
}

}  // namespace levylab
