#include "levylab/bernstein.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream os;
    os << what << " must lie in (0,1), got " << alpha;
    throw ArgumentError(os.str());
  }
}

double stable_measure_coefficient(double alpha) { return alpha / std::tgamma(1.0 - alpha); }

}  // namespace

void BernsteinSpec::validate() const {
  if (dim < 1) throw ArgumentError("dimension must be positive");
  std::visit(overloaded{
                 [](const Stable& s) { require_alpha(s.alpha, "alpha"); },
                 [](const RelativisticStable& s) {
                   require_alpha(s.alpha, "alpha");
                   if (!(s.mass > 0.0)) throw ArgumentError("mass must be positive");
                 },
                 [](const SumOfStables& s) {
                   require_alpha(s.alpha1, "alpha1");
                   require_alpha(s.alpha2, "alpha2");
                   if (!(s.w1 > 0.0 && s.w2 > 0.0)) throw ArgumentError("weights must be positive");
                 },
             },
             family);
}

std::string BernsteinSpec::name() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Stable& s) { os << "Stable(" << s.alpha << ")"; },
                 [&](const RelativisticStable& s) {
                   os << "RelativisticStable(" << s.alpha << "," << s.mass << ")";
                 },
                 [&](const SumOfStables& s) {
                   os << "SumOfStables(" << s.alpha1 << "," << s.w1 << "," << s.alpha2 << "," << s.w2
                      << ")";
                 },
             },
             family);
  return os.str();
}

BernsteinSpec make_stable(double alpha, int dim) {
  BernsteinSpec s{Stable{alpha}, dim};
  s.validate();
  return s;
}

BernsteinSpec make_relativistic(double alpha, double mass, int dim) {
  BernsteinSpec s{RelativisticStable{alpha, mass}, dim};
  s.validate();
  return s;
}

BernsteinSpec make_sum_of_stables(double alpha1, double w1, double alpha2, double w2, int dim) {
  BernsteinSpec s{SumOfStables{alpha1, w1, alpha2, w2}, dim};
  s.validate();
  return s;
}

long double psi_extended(const BernsteinSpec& spec, long double lambda) {
  if (lambda <= 0.0L) return 0.0L;
  return std::visit(
      overloaded{
          [&](const Stable& s) { return std::pow(lambda, static_cast<long double>(s.alpha)); },
          [&](const RelativisticStable& s) {
            // (l + mu)^a - mu^a with mu^a = m, written to avoid cancellation at small l.
            const long double a = s.alpha;
            const long double m = s.mass;
            const long double mu = std::pow(m, 1.0L / a);
            return m * std::expm1(a * std::log1p(lambda / mu));
          },
          [&](const SumOfStables& s) {
            return static_cast<long double>(s.w1) * std::pow(lambda, static_cast<long double>(s.alpha1)) +
                   static_cast<long double>(s.w2) * std::pow(lambda, static_cast<long double>(s.alpha2));
          },
      },
      spec.family);
}

double eval_psi(const BernsteinSpec& spec, double lambda) {
  if (!(lambda > 0.0)) {
    std::ostringstream os;
    os << "eval_psi: lambda must be positive, got " << lambda;
    throw DomainError(os.str());
  }
  return static_cast<double>(psi_extended(spec, lambda));
}

double log_levy_measure_density(const BernsteinSpec& spec, double t) {
  if (!(t > 0.0)) {
    std::ostringstream os;
    os << "levy_measure_density: t must be positive, got " << t;
    throw DomainError(os.str());
  }
  const double lt = std::log(t);
  return std::visit(
      overloaded{
          [&](const Stable& s) {
            return std::log(stable_measure_coefficient(s.alpha)) - (1.0 + s.alpha) * lt;
          },
          [&](const RelativisticStable& s) {
            const double mu = std::pow(s.mass, 1.0 / s.alpha);
            return std::log(stable_measure_coefficient(s.alpha)) - (1.0 + s.alpha) * lt - mu * t;
          },
          [&](const SumOfStables& s) {
            const double l1 = std::log(s.w1 * stable_measure_coefficient(s.alpha1)) - (1.0 + s.alpha1) * lt;
            const double l2 = std::log(s.w2 * stable_measure_coefficient(s.alpha2)) - (1.0 + s.alpha2) * lt;
            const double hi = std::max(l1, l2);
            return hi + std::log1p(std::exp(std::min(l1, l2) - hi));
          },
      },
      spec.family);
}

double levy_measure_density(const BernsteinSpec& spec, double t) {
  return std::exp(log_levy_measure_density(spec, t));
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw ArgumentError("log_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ScalingReport check_weak_scaling(const BernsteinSpec& spec, std::span<const double> r_grid,
                                 double a1, double a2, double b1) {
  if (!(a1 > 0.0 && a1 <= a2 && a2 < 1.0 && b1 >= 1.0)) {
    throw ArgumentError("check_weak_scaling: need 0 < a1 <= a2 < 1 <= b1");
  }
  std::vector<double> grid(r_grid.begin(), r_grid.end());
  std::sort(grid.begin(), grid.end());
  if (grid.empty() || grid.front() < 1.0) throw ArgumentError("check_weak_scaling: grid must lie in [1, inf)");

  std::vector<double> psi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) psi[i] = eval_psi(spec, grid[i]);

  ScalingReport rep{a1, a2, b1, true, 0.0, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      const double q = grid[j] / grid[i];
      const double ratio = psi[j] / psi[i];
      const double lower = std::pow(q, a1) / b1;
      const double upper = b1 * std::pow(q, a2);
      const double violation = std::max(lower / ratio, ratio / upper);
      if (violation > rep.worst_violation) {
        rep.worst_violation = violation;
        rep.witness = {grid[i], grid[j], ratio};
      }
    }
  }
  // Pairs on the power-law boundary evaluate to 1 up to rounding.
  rep.satisfied = rep.worst_violation <= 1.0 + 1e-12;
  return rep;
}

namespace {

// (1/pi) int_0^{pi/4} [log Psi(x^2 tan^2) + log Psi(x^2 cot^2)] dtheta on `panels`
// uniform panels, the first one refined geometrically toward the log
// singularity at theta = 0.
long double ladder_log_integral(const BernsteinSpec& spec, long double x, int panels) {
  using rule = boost::math::quadrature::gauss<long double, 10>;
  const long double quarter = std::numbers::pi_v<long double> / 4.0L;
  const long double x2 = x * x;

  auto integrand = [&](long double theta) {
    const long double t = std::tan(theta);
    const long double t2 = t * t;
    return std::log(psi_extended(spec, x2 * t2)) + std::log(psi_extended(spec, x2 / t2));
  };
  auto panel = [&](long double a, long double b) { return rule::integrate(integrand, a, b); };

  const long double w = quarter / panels;
  long double sum = 0.0L;
  for (int p = panels - 1; p >= 1; --p) sum += panel(w * p, w * (p + 1));
  long double hi = w;
  long double graded = 0.0L;
  while (hi > 1e-24L) {
    graded += panel(hi / 4.0L, hi);
    hi /= 4.0L;
  }
  sum += graded;
  return sum / std::numbers::pi_v<long double>;
}

}  // namespace

long double ladder_exponent_extended(const BernsteinSpec& spec, long double x, const LadderOptions& opts) {
  if (!(x > 0.0L)) {
    std::ostringstream os;
    os << "ladder_exponent: x must be positive, got " << static_cast<double>(x);
    throw DomainError(os.str());
  }
  int panels = opts.initial_panels;
  long double prev = std::exp(ladder_log_integral(spec, x, panels));
  long double change = 0.0L;
  for (int k = 0; k < opts.max_doublings; ++k) {
    panels *= 2;
    const long double next = std::exp(ladder_log_integral(spec, x, panels));
    change = std::fabs(next / prev - 1.0L);
    if (change < opts.rel_tol) return next;
    prev = next;
  }
  std::ostringstream os;
  os << "ladder_exponent: quadrature did not reach relative tolerance " << opts.rel_tol << " at x = "
     << static_cast<double>(x) << " (achieved " << static_cast<double>(change) << ")";
  throw NumericError(os.str(), static_cast<double>(change));
}

double ladder_exponent(const BernsteinSpec& spec, double x, const LadderOptions& opts) {
  return static_cast<double>(ladder_exponent_extended(spec, x, opts));
}

}  // namespace levylab
