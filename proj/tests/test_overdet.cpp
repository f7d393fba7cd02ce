#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/overdet.hpp"

using namespace levylab;

namespace {

struct Torsion {
  std::shared_ptr<const DomainGrid> grid;
  Field u;
};

Torsion torsion(const Shape& shape, double h, const JumpKernel& kernel) {
  auto g = std::make_shared<const DomainGrid>(shape, h);
  const auto op = assemble(*g, kernel);
  return {g, solve_linear(*op, Field(g, 1.0), Field(g, 0.0))};
}

const JumpKernel& kernel_half() {
  static const JumpKernel k(make_stable(0.5), 2);
  return k;
}
const RenewalFunction& renewal_half() {
  static const RenewalFunction v(make_stable(0.5));
  return v;
}

// Rotation by +90 degrees about the grid center: (i, j) -> (n-1-j, i).
Field rotate(const Field& u) {
  const auto& g = *u.grid;
  const int n = g.n();
  Field out(u.grid);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out.values[g.index(n - 1 - j, i)] = u.values[g.index(i, j)];
  }
  return out;
}

}  // namespace

TEST_CASE("synthetic traces") {
  const Shape ellipse = Ellipse{1.5, 1.0};
  const auto& V = renewal_half();
  auto u = [&](Point p) { return V(std::max(signed_distance(ellipse, p), 0.0)); };
  const auto profile = trace_profile(u, ellipse, V, 1.0 / 64);
  const auto st = trace_constancy(profile);
  CHECK(st.mean == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(st.cv <= 1e-3);
  for (const auto& p : profile.points) {
    CHECK(p.residual <= 1e-3);
    CHECK(p.lower == doctest::Approx(1.0).epsilon(1e-6));
  }
  const auto zero = trace_profile([](Point) { return 0.0; }, ellipse, V, 1.0 / 64);
  CHECK(trace_constancy(zero).mean == 0.0);
  CHECK(trace_constancy(zero).cv == 0.0);
  CHECK(hopf_probe([](Point) { return 0.0; }, ellipse, V, {1.5, 0.0}, {1.0, 0.0}, 1.0 / 64) == 0.0);

  // Ladder pointing out of the domain.
  CHECK_THROWS_AS(boundary_trace(u, ellipse, V, {1.5, 0.0}, {-1.0, 0.0}, 1.0 / 64), GeometryError);
  TraceProfile few;
  few.points.resize(8);
  CHECK_THROWS_AS(trace_constancy(few), ArgumentError);

  std::ostringstream os;
  write_trace_csv(os, profile);
  CHECK(os.str().rfind("index,angle,trace,residual\n", 0) == 0);
}

TEST_CASE("ball torsion trace and its symmetries") {
  const auto t = torsion(Ball{1.0}, 1.0 / 64, kernel_half());
  const auto& V = renewal_half();
  const auto profile = trace_profile(t.u, V);
  const auto st = trace_constancy(profile);
  CHECK(st.mean == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(0.05));
  CHECK(st.cv <= 0.05);
  CHECK(hopf_probe(t.u, V, {1.0, 0.0}, {1.0, 0.0}) >= 0.5);

  // 32 points: a quarter turn shifts the index by 8.
  const auto rotated = trace_profile(rotate(t.u), V);
  for (std::size_t k = 0; k < 32; ++k) {
    REQUIRE(rotated.points[(k + 8) % 32].trace == doctest::Approx(profile.points[k].trace).epsilon(1e-12));
  }
  const auto rst = trace_constancy(rotated);
  CHECK(std::fabs(rst.mean - st.mean) <= 1e-12);
  CHECK(std::fabs(rst.cv - st.cv) <= 1e-12);

  Field scaled = t.u;
  for (auto& v : scaled.values) v *= 3.5;
  const auto sst = trace_constancy(trace_profile(scaled, V));
  CHECK(sst.cv == doctest::Approx(st.cv).epsilon(1e-12));
  CHECK(sst.mean == doctest::Approx(3.5 * st.mean).epsilon(1e-12));
}

TEST_CASE("ellipse trace is far from constant") {
  const auto& V = renewal_half();
  const auto ball = trace_constancy(trace_profile(torsion(Ball{1.0}, 1.0 / 32, kernel_half()).u, V));
  const auto ellipse = trace_constancy(trace_profile(torsion(Ellipse{1.5, 1.0}, 1.0 / 32, kernel_half()).u, V));
  CHECK(ellipse.cv >= 3.0 * ball.cv);
}

TEST_CASE("H_r increases and scales like r^alpha") {
  const auto H = h_curve(kernel_half(), renewal_half(), {0.5, 1.0, 2.0}, 32.0);
  REQUIRE(H.size() == 3);
  CHECK(H[0].H < H[1].H);
  CHECK(H[1].H < H[2].H);
  CHECK(H[1].H / H[0].H == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
  CHECK(H[2].H / H[1].H == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
  CHECK_THROWS_AS(h_curve(kernel_half(), renewal_half(), {1.0, 0.5}), ArgumentError);
}

TEST_CASE("moving planes on the ball") {
  const auto t = torsion(Ball{1.0}, 1.0 / 32, kernel_half());
  const double umax = t.u.max_abs();
  for (Point e : lattice_directions()) {
    std::vector<double> lambdas;
    for (int k = 0; k < 6; ++k) lambdas.push_back(snap_plane(*t.grid, e, 0.15 * k));
    const auto scan = moving_plane_scan(t.u, e, lambdas);
    CHECK(std::fabs(scan.critical_lambda) < 1e-6);
    CHECK(std::max(-scan.planes[0].min_v, scan.planes[0].max_v) <= 1e-3 * umax);
    for (const auto& p : scan.planes) {
      CHECK(p.min_v >= -5e-3 * umax);
      CHECK_FALSE(p.past_critical);
    }
  }
  CHECK_THROWS_AS(snap_plane(*t.grid, {0.6, 0.8}, 0.1), ArgumentError);
  CHECK(reflect({0.3, 0.1}, {1.0, 0.0}, 0.5)[0] == doctest::Approx(0.7));
}

TEST_CASE("moving-plane anti-symmetry identity") {
  const auto t = torsion(Egg{0.3}, 1.0 / 32, kernel_half());
  const auto& g = *t.grid;
  const Point e{1.0, 0.0};
  const double lambda = snap_plane(g, e, 0.5);
  // w = u o R on the nodes, an exact permutation for a snapped plane.
  Field w(t.grid);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point rx = reflect(g.node(k), e, lambda);
    w.values[k] = g.in_bbox(rx) ? t.u.interpolate(rx) : 0.0;
  }
  const auto a = moving_plane_scan(t.u, e, {lambda});
  const auto b = moving_plane_scan(w, e, {lambda});
  CHECK(b.planes[0].min_v == doctest::Approx(-a.planes[0].max_v).epsilon(1e-12));
  CHECK(b.planes[0].max_v == doctest::Approx(-a.planes[0].min_v).epsilon(1e-12));
}

TEST_CASE("moving planes detect the egg's asymmetry") {
  const auto t = torsion(Egg{0.3}, 1.0 / 32, kernel_half());
  const Point e{1.0, 0.0};
  const double crit = critical_plane(Egg{0.3}, e);
  const double past = snap_plane(*t.grid, e, crit - 0.15);
  const double before = snap_plane(*t.grid, e, crit + 0.3);
  const auto scan = moving_plane_scan(t.u, e, {before, past});
  CHECK_FALSE(scan.planes[0].past_critical);
  CHECK(scan.planes[0].min_v >= -5e-3 * t.u.max_abs());
  CHECK(scan.planes[1].past_critical);
  CHECK(scan.planes[1].min_v < -0.1 * t.u.max_abs());
}

TEST_CASE("radial monotonicity") {
  const auto t = torsion(Ball{1.0}, 1.0 / 32, kernel_half());
  CHECK(radial_monotonicity(t.u, {0.0, 0.0}).pass);
  const auto flat = radial_monotonicity(Field(t.grid, 1.0), {0.0, 0.0});
  CHECK_FALSE(flat.pass);
  CHECK(flat.worst_violation == 0.0);

  auto g = std::make_shared<const DomainGrid>(Annulus{0.4, 1.0}, 1.0 / 32);
  const auto op = assemble(*g, kernel_half());
  Field data(g, 0.0);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const Point p = g->node(k);
    if (std::hypot(p[0], p[1]) <= 0.4) data.values[k] = 1.0;
  }
  const Field u = solve_linear(*op, Field(g, 0.0), data);
  CHECK(radial_monotonicity(u, {0.0, 0.0}, 0.4).pass);
}

TEST_CASE("diagonal decay probe") {
  const auto& V = renewal_half();
  const Point corner{0.0, 1.0};
  const Point dir{-std::sqrt(0.5), -std::sqrt(0.5)};
  auto along = [&](Point p) { return std::hypot(p[0] - corner[0], p[1] - corner[1]); };
  const auto fast = diagonal_decay_probe([&](Point p) { const double t = along(p); return V(t) * t * t; }, V, corner,
                                         dir, 1.0 / 64);
  CHECK_FALSE(fast.identically_zero);
  CHECK(fast.ratio.front() < fast.ratio.back());  // ratio = t, vanishing as t -> 0
  CHECK(fast.slope > 1.0);
  const auto corner_hopf =
      diagonal_decay_probe([&](Point p) { const double t = along(p); return V(t) * t; }, V, corner, dir, 1.0 / 64);
  for (double r : corner_hopf.ratio) CHECK(r == doctest::Approx(1.0));
  CHECK(corner_hopf.slope == doctest::Approx(1.0));

  const auto t = torsion(Ball{1.0}, 1.0 / 32, kernel_half());
  Field v(t.grid);
  const Point e{1.0, 0.0};
  for (std::size_t k = 0; k < t.grid->size(); ++k) {
    v.values[k] = t.u.values[k] - t.u.interpolate(reflect(t.grid->node(k), e, 0.0));
  }
  CHECK(diagonal_decay_probe(v, V, {0.0, 1.0}, dir).identically_zero);
}

TEST_CASE("rigidity report serialization") {
  RigidityReport r;
  r.shape = "Ellipse(1.5,1)";
  r.trace_mean = 0.8;
  r.trace_cv = 0.07;
  const auto j = to_json(r);
  CHECK(j["h_value"] == "not-applicable");
  CHECK(j["radial_monotonicity"] == "not-applicable");
  CHECK(j["trace_cv"].get<double>() == 0.07);
  r.h_value = 0.77;
  r.radial = RadialVerdict{true, -0.01, 40};
  r.moving_plane.push_back({{1.0, 0.0}, 0.001});
  const auto k = to_json(r);
  CHECK(k["h_value"].get<double>() == 0.77);
  CHECK(k["radial_monotonicity"]["pass"] == true);
  CHECK(k["moving_plane"].size() == 1);
}
