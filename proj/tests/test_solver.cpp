#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "levylab/errors.hpp"
#include "levylab/solver.hpp"

using namespace levylab;

namespace {

double torsion_oracle(double s, double r, double x) {
  return std::pow(r * r - x * x, s) / (std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(1.0 + s));
}

const JumpKernel& stable_half() {
  static const JumpKernel k(make_stable(0.5), 2);
  return k;
}

}  // namespace

TEST_CASE("stencil is a symmetric M-matrix that kills constants") {
  auto g = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 16);
  const auto op = assemble(*g, stable_half());
  const auto rep = check_m_matrix(*op);
  CHECK(rep.pass);
  CHECK(rep.min_weight >= 0.0);
  CHECK(rep.dominance_margin == doctest::Approx(op->tail()).epsilon(1e-10));
  CHECK(op->kappa() > 0.0);
  CHECK(op->weight(3, -2) == op->weight(-2, 3));
  CHECK(op->weight(5, 1) == op->weight(-5, -1));

  const Field one(g, 1.0);
  const Field lu = apply(*op, one, FarField::constant(1.0));
  for (std::size_t k : g->interior()) REQUIRE(std::fabs(lu.values[k]) < 1e-8);
  CHECK(std::fabs(apply_at(*op, one, g->interior().front(), FarField::constant(1.0))) < 1e-8);
}

TEST_CASE("FFT application matches direct summation") {
  auto g = std::make_shared<const DomainGrid>(Ellipse{1.5, 1.0}, 1.0 / 12);
  const auto op = assemble(*g, JumpKernel(make_relativistic(0.5, 1.0), 2));
  const Field u = sample_field(g, [](Point p) { return std::exp(-p[0] * p[0]) * (1.0 + 0.3 * p[1]); });
  for (const FarField& far : {FarField::zero(), FarField::constant(0.7), FarField::cosine({1.0, 0.5})}) {
    const Field lu = apply(*op, u, far);
    const auto& in = g->interior();
    for (std::size_t q = 0; q < in.size(); q += 37) {
      CHECK(lu.values[in[q]] == doctest::Approx(apply_at(*op, u, in[q], far)).epsilon(1e-9));
    }
  }
}

TEST_CASE("discrete symbol reproduces Psi(|xi|^2)") {
  for (const auto& spec : {make_stable(0.5), make_relativistic(0.5, 1.0)}) {
    const JumpKernel kernel(spec, 2);
    double previous = 1.0;
    for (double h : {1.0 / 32, 1.0 / 64}) {
      DomainGrid g(Ball{1.0}, h);
      const auto op = assemble(g, kernel);
      double worst = 0.0;
      for (Point xi : {Point{1.0, 0.0}, Point{0.0, 2.0}, Point{0.6, 0.8}, Point{std::sqrt(2.0), std::sqrt(2.0)}}) {
        const double exact = eval_psi(spec, xi[0] * xi[0] + xi[1] * xi[1]);
        worst = std::max(worst, std::fabs(op->discrete_symbol(xi) / exact - 1.0));
      }
      CAPTURE(spec.name());
      CAPTURE(h);
      CHECK(worst <= 1e-2);
      CHECK(worst < previous);
      previous = worst;
    }
  }
  DomainGrid g(Ball{1.0}, 1.0 / 32);
  const auto op = assemble(g, stable_half());
  CHECK(op->discrete_symbol({1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("applied to a cosine the scheme multiplies by its symbol") {
  auto g = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 16);
  const auto op = assemble(*g, stable_half());
  const Point xi{1.0, 1.0};
  const Field c = sample_field(g, [&](Point p) { return std::cos(xi[0] * p[0] + xi[1] * p[1]); });
  const Field lc = apply(*op, c, FarField::cosine(xi));
  const double sym = op->discrete_symbol(xi);
  for (std::size_t k : g->interior()) REQUIRE(lc.values[k] == doctest::Approx(sym * c.values[k]).epsilon(1e-6).scale(1.0));
  CHECK(sym == doctest::Approx(std::sqrt(2.0)).epsilon(1e-2));
}

TEST_CASE("kernel table must cover the stencil") {
  const JumpKernel narrow(make_stable(0.5), 2, KernelTableOptions{1e-3, 1.0, 16});
  DomainGrid g(Ball{1.0}, 1.0 / 8);
  CHECK_THROWS_AS(assemble(g, narrow), ConfigError);
}

TEST_CASE("torsion on the unit ball") {
  auto g = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 64);
  const auto op = assemble(*g, stable_half());
  SolveStats stats;
  const Field u = solve_linear(*op, Field(g, 1.0), Field(g, 0.0), {}, &stats);
  CHECK(stats.residual <= 1e-10);
  const int mid = g->n() / 2;
  CHECK(u.at(mid, mid) == doctest::Approx(2.0 / std::numbers::pi).epsilon(0.02));
  CHECK(u.interpolate({0.5, 0.0}) == doctest::Approx(torsion_oracle(0.5, 1.0, 0.5)).epsilon(0.02));
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (!g->inside(k)) REQUIRE(u.values[k] == 0.0);
  }
}

TEST_CASE("trivial solves and monotonicity in the radius") {
  auto g = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 16);
  const auto op = assemble(*g, stable_half());
  const Field zero = solve_linear(*op, Field(g, 0.0), Field(g, 0.0));
  CHECK(zero.max_abs() == 0.0);

  double previous = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    auto gr = std::make_shared<const DomainGrid>(Ball{r}, r / 16);
    const auto opr = assemble(*gr, stable_half());
    const Field u = solve_linear(*opr, Field(gr, 1.0), Field(gr, 0.0));
    const double centre = u.at(gr->n() / 2, gr->n() / 2);
    CHECK(centre > previous);
    CHECK(centre == doctest::Approx(torsion_oracle(0.5, r, 0.0)).epsilon(0.02));
    previous = centre;
  }
}

TEST_CASE("discrete maximum principle on random data") {
  auto g = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 16);
  const auto op = assemble(*g, stable_half());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Field f(g), gext(g);
    for (auto& v : f.values) v = unif(rng);
    for (auto& v : gext.values) v = unif(rng);
    const Field u = solve_linear(*op, f, gext);
    double lo = 1.0;
    for (double v : u.values) lo = std::min(lo, v);
    CHECK(lo >= 0.0);

    // f = 0: the extremes over the inside are bounded by those of the data.
    const Field h0 = solve_linear(*op, Field(g, 0.0), gext);
    double gmax = 0.0, umax = 0.0, umin = 1.0;
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (g->inside(k)) {
        umax = std::max(umax, h0.values[k]);
        umin = std::min(umin, h0.values[k]);
      } else {
        gmax = std::max(gmax, gext.values[k]);
      }
    }
    CHECK(umax <= gmax);
    CHECK(umin >= 0.0);
  }
}

TEST_CASE("semilinear Picard iteration") {
  auto g = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 16);
  const auto op = assemble(*g, stable_half());
  const Field zero(g, 0.0);
  const Field lin = solve_linear(*op, Field(g, 1.0), zero);
  const Field same = solve_semilinear(*op, [](double) { return 1.0; }, zero);
  for (std::size_t k = 0; k < g->size(); ++k) REQUIRE(same.values[k] == doctest::Approx(lin.values[k]).epsilon(1e-9));

  SemilinearStats stats;
  auto f = [](double u) { return 1.0 - u; };
  const Field u = solve_semilinear(*op, f, zero, {}, &stats);
  CHECK(stats.last_change < 1e-8);
  CHECK(semilinear_residual(*op, u, f) <= 1e-6);

  CHECK(solve_semilinear(*op, [](double) { return 0.0; }, zero).max_abs() == 0.0);
  SemilinearOptions tight;
  tight.max_iterations = 2;
  CHECK_THROWS_AS(solve_semilinear(*op, f, zero, tight), NumericError);
  CHECK_THROWS_AS(solve_linear(*op, Field(g, 1.0), zero, SolveOptions{1e-10, 1}), NumericError);
}
