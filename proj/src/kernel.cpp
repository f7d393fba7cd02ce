#include "levylab/kernel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"

namespace levylab {

namespace {

using gauss10 = boost::math::quadrature::gauss<double, 10>;

template <class F>
double gauss_panel(F&& f, double a, double b) {
  return gauss10::integrate(f, a, b);
}

// Composite Gauss rule on [a, b] with panels of width at most `width`.
template <class F>
double gauss_composite(F&& f, double a, double b, double width) {
  if (!(b > a)) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double step = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += gauss_panel(f, a + i * step, a + (i + 1) * step);
  return acc;
}

// log m(e^{log_t}) with the family constants hoisted out of the hot loop.
std::function<double(double)> log_measure_evaluator(const BernsteinSpec& spec) {
  auto coef = [](double a, double w) { return std::log(w * a / std::tgamma(1.0 - a)); };
  if (const auto* s = std::get_if<Stable>(&spec.family)) {
    const double c = coef(s->alpha, 1.0);
    const double p = 1.0 + s->alpha;
    return [c, p](double lt) { return c - p * lt; };
  }
  if (const auto* s = std::get_if<RelativisticStable>(&spec.family)) {
    const double c = coef(s->alpha, 1.0);
    const double p = 1.0 + s->alpha;
    const double mu = std::pow(s->mass, 1.0 / s->alpha);
    return [c, p, mu](double lt) { return c - p * lt - mu * std::exp(lt); };
  }
  const auto& s = std::get<SumOfStables>(spec.family);
  const double c1 = coef(s.alpha1, s.w1);
  const double c2 = coef(s.alpha2, s.w2);
  const double p1 = 1.0 + s.alpha1;
  const double p2 = 1.0 + s.alpha2;
  return [=](double lt) {
    const double l1 = c1 - p1 * lt;
    const double l2 = c2 - p2 * lt;
    const double m = std::max(l1, l2);
    return m + std::log1p(std::exp(std::min(l1, l2) - m));
  };
}

}  // namespace

double sphere_area(int dim) {
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double log_levy_density(const BernsteinSpec& spec, int dim, double r) {
  if (!(r > 0.0)) {
    std::ostringstream os;
    os << "levy_density: r must be positive, got " << r;
    throw DomainError(os.str());
  }
  // t = r^2 e^u; the Gaussian factor exp(-e^{-u}/4) switches on around u = 0,
  // which is where the integration range is split.
  const double r2 = r * r;
  const double half_d = 0.5 * dim;
  const double log_r2 = std::log(r2);
  const double log_4pi = std::log(4.0 * std::numbers::pi);
  const auto log_measure = log_measure_evaluator(spec);
  auto log_integrand = [&](double u) {
    const double log_t = log_r2 + u;
    return -half_d * (log_4pi + log_t) - 0.25 * std::exp(-u) + log_measure(log_t) + log_t;
  };

  constexpr double scan_lo = -15.0;
  constexpr double scan_step = 0.05;
  constexpr int n_scan = 2700;
  std::vector<double> scan(n_scan + 1);
  for (int i = 0; i <= n_scan; ++i) scan[static_cast<std::size_t>(i)] = log_integrand(scan_lo + i * scan_step);
  const double peak = *std::max_element(scan.begin(), scan.end());
  constexpr double cutoff = 90.0;
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (int i = 0; i <= n_scan; ++i) {
    if (scan[static_cast<std::size_t>(i)] - peak > -cutoff) {
      const double u = scan_lo + i * scan_step;
      lo = found ? std::min(lo, u) : u;
      hi = found ? std::max(hi, u) : u;
      found = true;
    }
  }
  lo -= 0.5;
  hi += 0.5;

  auto integrand = [&](double u) { return std::exp(log_integrand(u) - peak); };
  auto integrate = [&](double width) {
    double acc = 0.0;
    if (lo < 0.0) acc += gauss_composite(integrand, lo, std::min(0.0, hi), width);
    if (hi > 0.0) acc += gauss_composite(integrand, std::max(0.0, lo), hi, width);
    return acc;
  };

  double width = 0.2;
  double prev = integrate(width);
  double change = 1.0;
  for (int level = 0; level < 8; ++level) {
    width *= 0.5;
    const double next = integrate(width);
    change = std::fabs(next / prev - 1.0);
    prev = next;
    if (change < 1e-10) return peak + std::log(next);
  }
  if (change < 1e-5) return peak + std::log(prev);
  std::ostringstream os;
  os << "levy_density: quadrature failed at r = " << r << " (achieved " << change << ")";
  throw NumericError(os.str(), change);
}

double levy_density(const BernsteinSpec& spec, int dim, double r) {
  return std::exp(log_levy_density(spec, dim, r));
}

namespace {

std::vector<double> table_radii(const KernelTableOptions& o) {
  if (!(o.r_min > 0.0 && o.r_max > o.r_min) || o.points_per_decade < 2) {
    throw ArgumentError("JumpKernel: invalid table range");
  }
  const double decades = std::log10(o.r_max / o.r_min);
  const int n = static_cast<int>(std::lround(decades * o.points_per_decade)) + 1;
  return log_grid(o.r_min, o.r_max, n);
}

}  // namespace

JumpKernel::JumpKernel(BernsteinSpec spec, int dim, KernelTableOptions opts)
    : spec_(std::move(spec)), dim_(dim), opts_(opts), radii_(table_radii(opts_)) {
  spec_.validate();
  if (dim_ < 1) throw ArgumentError("JumpKernel: dimension must be positive");
  log_j_.resize(radii_.size());
  for (std::size_t i = 0; i < radii_.size(); ++i) log_j_[i] = log_levy_density(spec_, dim_, radii_[i]);
  for (std::size_t i = 1; i < log_j_.size(); ++i) {
    if (!(log_j_[i] < log_j_[i - 1])) {
      std::ostringstream os;
      os << "JumpKernel: tabulated density not strictly decreasing at r = " << radii_[i];
      throw NumericError(os.str(), 0.0);
    }
  }
  log_r_min_ = std::log(opts_.r_min);
  log_r_max_ = std::log(opts_.r_max);
  const std::size_t n = radii_.size();
  const double step = (log_r_max_ - log_r_min_) / static_cast<double>(n - 1);
  // End slopes d log j / d log r by central differences of the quadrature;
  // they anchor the spline and define the power-law continuations.
  constexpr double eps = 1e-4;
  auto slope_at = [&](double r) {
    return (log_levy_density(spec_, dim_, r * std::exp(eps)) - log_levy_density(spec_, dim_, r * std::exp(-eps))) /
           (2.0 * eps);
  };
  origin_exponent_ = slope_at(opts_.r_min);
  tail_exponent_ = slope_at(opts_.r_max);
  spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(
      log_j_.begin(), log_j_.end(), log_r_min_, step, origin_exponent_, tail_exponent_);
}

double JumpKernel::log_value(double r) const {
  const double lr = std::log(r);
  if (lr <= log_r_min_) return log_j_.front() + origin_exponent_ * (lr - log_r_min_);
  if (lr >= log_r_max_) return log_j_.back() + tail_exponent_ * (lr - log_r_max_);
  return spline_(lr);
}

namespace {

// int_a^b rho^k j(rho) drho for a kernel, splitting at the table ends where
// the power-law continuations integrate in closed form.
double radial_moment(const JumpKernel& kernel, int k, double a, double b) {
  if (!(b > a)) return 0.0;
  double acc = 0.0;
  const double rmin = kernel.r_min();
  const double rmax = kernel.r_max();
  auto power_piece = [&](double lo, double hi, double r0, double logj0, double p) {
    // int_lo^hi j0 (rho/r0)^p rho^k drho
    const double e = p + k + 1.0;
    const double j0 = std::exp(logj0);
    if (std::fabs(e) < 1e-12) return j0 * std::pow(r0, -p) * std::log(hi / lo);
    const double upper = std::isinf(hi) ? 0.0 : std::pow(hi / r0, e);
    if (std::isinf(hi) && e >= 0.0) return std::numeric_limits<double>::infinity();
    const double lower = lo > 0.0 ? std::pow(lo / r0, e) : (e > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return j0 * std::pow(r0, k + 1.0) * (upper - lower) / e;
  };
  if (a < rmin) {
    acc += power_piece(a, std::min(b, rmin), rmin, kernel.log_values().front(), kernel.origin_exponent());
  }
  const double lo = std::max(a, rmin);
  const double hi = std::min(b, rmax);
  if (hi > lo) {
    auto f = [&](double v) { return std::exp(kernel.log_value(std::exp(v)) + (k + 1.0) * v); };
    const double width = std::log(10.0) / kernel.points_per_decade();
    acc += gauss_composite(f, std::log(lo), std::log(hi), width);
  }
  if (b > rmax) {
    acc += power_piece(std::max(a, rmax), b, rmax, kernel.log_values().back(), kernel.tail_exponent());
  }
  return acc;
}

}  // namespace

double JumpKernel::tail_mass(double R) const {
  return sphere_area(dim_) * radial_moment(*this, dim_ - 1, R, std::numeric_limits<double>::infinity());
}

double JumpKernel::shell_second_moment(double a, double b) const {
  return sphere_area(dim_) * radial_moment(*this, dim_ + 1, a, b);
}

void JumpKernel::write_csv(std::ostream& os) const {
  os << "r,j\n";
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    os << format_double(radii_[i]) << ',' << format_double(std::exp(log_j_[i])) << '\n';
  }
}

KernelBoundsReport check_kernel_bounds(const JumpKernel& kernel) {
  KernelBoundsReport rep;
  const int d = kernel.dim();
  double best_b2 = -std::numeric_limits<double>::infinity();
  double best_c = -std::numeric_limits<double>::infinity();
  for (double r : kernel.radii()) {
    if (r >= 1.0 && r + 1.0 <= kernel.r_max()) {
      const double log_ratio = kernel.log_value(r) - kernel.log_value(r + 1.0);
      if (log_ratio > best_b2) {
        best_b2 = log_ratio;
        rep.b2_argmax = r;
      }
    }
    const double log_c = kernel.log_value(r) + d * std::log(r) - std::log(eval_psi(kernel.spec(), 1.0 / (r * r)));
    if (log_c > best_c) {
      best_c = log_c;
      rep.C_argmax = r;
    }
  }
  rep.b2_fitted = std::exp(best_b2);
  rep.C_fitted = std::exp(best_c);
  rep.pass = std::isfinite(rep.b2_fitted) && std::isfinite(rep.C_fitted) && rep.b2_fitted > 0.0 &&
             rep.C_fitted > 0.0;
  return rep;
}

double fitted_loglog_slope(const JumpKernel& kernel, double lo, double hi, int n) {
  const auto grid = log_grid(lo, hi, n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r : grid) {
    const double x = std::log(r);
    const double y = kernel.log_value(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(grid.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace levylab
