#include "doctest.h"

#include <cmath>
#include <numbers>

#include "levylab/bernstein.hpp"
#include "levylab/errors.hpp"

using namespace levylab;

namespace {

// Trapezoid rule in v = log t over [lo, hi] with n panels.
template <class F>
double trapezoid_log(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double acc = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) acc += f(lo + i * h);
  return acc * h;
}

// Levy-Khintchine reconstruction of Psi from the measure density, up to T,
// plus the analytic tail int_T^inf m(t) dt (the exponential is below 1e-40
// there for every lambda used).
double reconstruct_psi(const BernsteinSpec& spec, double lambda, double T) {
  auto f = [&](double v) {
    const double t = std::exp(v);
    return -std::expm1(-lambda * t) * levy_measure_density(spec, t) * t;
  };
  double body = trapezoid_log(f, std::log(1e-40), std::log(T), 400000);
  auto stable_tail = [&](double a, double w) { return w * std::pow(T, -a) / std::tgamma(1.0 - a); };
  double tail = 0.0;
  if (const auto* s = std::get_if<Stable>(&spec.family)) tail = stable_tail(s->alpha, 1.0);
  if (const auto* s = std::get_if<SumOfStables>(&spec.family)) {
    tail = stable_tail(s->alpha1, s->w1) + stable_tail(s->alpha2, s->w2);
  }
  return body + tail;  // relativistic tail is O(exp(-T))
}

}  // namespace

TEST_CASE("eval_psi closed forms") {
  CHECK(eval_psi(make_stable(0.5), 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_psi(make_sum_of_stables(0.3, 1.0, 0.7, 2.0), 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  // alpha -> 1 limit of the relativistic family: (3+1) - 1.
  CHECK(eval_psi(make_relativistic(1.0 - 1e-9, 1.0), 3.0) == doctest::Approx(3.0).epsilon(1e-7));
  // small-lambda branch keeps full relative accuracy: Psi ~ (alpha m^{(alpha-1)/alpha}) lambda
  CHECK(eval_psi(make_relativistic(0.5, 1.0), 1e-12) == doctest::Approx(0.5e-12).epsilon(1e-9));
}

TEST_CASE("eval_psi rejects non-positive arguments") {
  CHECK_THROWS_AS(eval_psi(make_stable(0.5), 0.0), DomainError);
  CHECK_THROWS_AS(eval_psi(make_stable(0.5), -1.0), DomainError);
  CHECK_THROWS_AS(make_stable(1.0), ArgumentError);
  CHECK_THROWS_AS(make_relativistic(0.5, 0.0), ArgumentError);
}

TEST_CASE("levy measure density values") {
  const double c = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
  CHECK(levy_measure_density(make_stable(0.5), 1.0) == doctest::Approx(c).epsilon(1e-14));
  CHECK(levy_measure_density(make_relativistic(0.5, 1.0), 1.0) == doctest::Approx(c * std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(levy_measure_density(make_stable(0.5), 0.0), DomainError);
  const auto s = make_stable(0.4);
  double prev = levy_measure_density(s, 1.0);
  for (double t = 2.0; t < 1e8; t *= 2.0) {
    const double cur = levy_measure_density(s, t);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("Levy-Khintchine reconstruction of Psi") {
  const BernsteinSpec specs[] = {make_stable(0.5), make_stable(0.25), make_relativistic(0.5, 1.0),
                                 make_sum_of_stables(0.3, 1.0, 0.7, 2.0)};
  for (const auto& spec : specs) {
    for (double lambda : {0.1, 1.0, 10.0, 100.0}) {
      const double psi = eval_psi(spec, lambda);
      const double rec = reconstruct_psi(spec, lambda, 1e4);
      CAPTURE(spec.name());
      CAPTURE(lambda);
      CHECK(std::fabs(rec - psi) / psi <= 1e-4);
    }
  }
  // the documented example tolerance at lambda = 1
  CHECK(std::fabs(reconstruct_psi(make_stable(0.5), 1.0, 1e4) - 1.0) <= 1e-6);
}

TEST_CASE("Psi is increasing and concave on log grids") {
  const BernsteinSpec specs[] = {make_stable(0.1), make_stable(0.9), make_relativistic(0.5, 1.0),
                                 make_relativistic(0.25, 3.0), make_sum_of_stables(0.3, 1.0, 0.7, 1.0)};
  for (const auto& spec : specs) {
    const auto grid = log_grid(1e-4, 1e4, 161);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double a = eval_psi(spec, grid[i - 1]);
      const double b = eval_psi(spec, grid[i]);
      const double c = eval_psi(spec, grid[i + 1]);
      CHECK(b > a);
      // chord slopes decrease on a non-uniform grid
      CHECK((c - b) / (grid[i + 1] - grid[i]) < (b - a) / (grid[i] - grid[i - 1]));
    }
  }
}

TEST_CASE("weak scaling checks") {
  const auto grid = log_grid(1.0, 1e4, 41);
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    const auto rep = check_weak_scaling(make_stable(a), grid, a, a, 1.0);
    CAPTURE(a);
    CHECK(rep.satisfied);
  }
  const auto bad = check_weak_scaling(make_stable(0.5), grid, 0.6, 0.6, 1.0);
  CHECK_FALSE(bad.satisfied);
  CHECK(bad.worst_violation > 1.0);
  CHECK(bad.witness.R > bad.witness.r);
  CHECK(bad.witness.ratio == doctest::Approx(std::pow(bad.witness.R / bad.witness.r, 0.5)));

  CHECK(check_weak_scaling(make_sum_of_stables(0.3, 1.0, 0.7, 1.0), grid, 0.3, 0.7, 2.0).satisfied);
  CHECK_THROWS_AS(check_weak_scaling(make_stable(0.5), grid, 0.7, 0.6, 1.0), ArgumentError);
  CHECK_THROWS_AS(check_weak_scaling(make_stable(0.5), grid, 0.5, 1.0, 1.0), ArgumentError);
}

TEST_CASE("ladder exponent for the stable family") {
  for (double a : {0.25, 0.5, 0.75}) {
    for (double x : {0.1, 1.0, 10.0, 100.0}) {
      const double exact = std::pow(x, a);
      CHECK(std::fabs(ladder_exponent(make_stable(a), x) - exact) / exact <= 1e-12);
    }
  }
  CHECK(ladder_exponent(make_stable(0.5), 4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(ladder_exponent(make_stable(0.5), 0.0), DomainError);
}

TEST_CASE("ladder exponent against a fine trapezoid oracle") {
  // y = e^v turns the weight dy/(1+y^2) into dv/(2 cosh v).
  auto oracle = [](const BernsteinSpec& spec, double x) {
    const int n = 1000000;
    const double lo = -50.0, hi = 50.0, h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double v = lo + i * h;
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      acc += w * std::log(eval_psi(spec, x * x * std::exp(2.0 * v))) / (2.0 * std::cosh(v));
    }
    return std::exp(acc * h / std::numbers::pi);
  };
  const BernsteinSpec specs[] = {make_sum_of_stables(0.3, 0.5, 0.7, 0.5), make_relativistic(0.5, 1.0)};
  for (const auto& spec : specs) {
    for (double x : {1.0, 0.2, 7.0}) {
      const double ref = oracle(spec, x);
      CAPTURE(spec.name());
      CAPTURE(x);
      CHECK(std::fabs(ladder_exponent(spec, x) - ref) / ref <= 1e-8);
    }
  }
}

TEST_CASE("ladder exponent reports non-convergence") {
  LadderOptions opts;
  opts.rel_tol = 0.0;
  opts.max_doublings = 1;
  try {
    ladder_exponent(make_relativistic(0.5, 1.0), 2.0, opts);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.achieved() >= 0.0);
    CHECK(e.achieved() < 1e-6);
  }
}
