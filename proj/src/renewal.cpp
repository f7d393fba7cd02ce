#include "levylab/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"

namespace levylab {

const std::vector<long double>& stehfest_coefficients(int order) {
  if (order < 2 || order % 2 != 0 || order > 40) throw ArgumentError("Stehfest order must be even in [2, 40]");
  static std::mutex mutex;
  static std::map<int, std::vector<long double>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  auto fact = [](int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  const int half = order / 2;
  std::vector<long double> c(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    long double s = 0.0L;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      s += std::pow(static_cast<long double>(j), half) * fact(2 * j) /
           (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    c[static_cast<std::size_t>(k - 1)] = ((k + half) % 2 == 0 ? 1.0L : -1.0L) * s;
  }
  return cache.emplace(order, std::move(c)).first->second;
}

double surrogate_V(const BernsteinSpec& spec, double r) {
  if (!(r > 0.0)) throw DomainError("surrogate_V: r must be positive");
  return 1.0 / std::sqrt(eval_psi(spec, 1.0 / (r * r)));
}

double renewal_V_laplace(const BernsteinSpec& spec, double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("renewal_V: x must be nonnegative");
  if (x == 0.0) return 0.0;
  auto transform = [&](long double s) { return 1.0L / (s * ladder_exponent_extended(spec, s)); };
  return static_cast<double>(gaver_stehfest(transform, static_cast<long double>(x), 14));
}

double renewal_V(const BernsteinSpec& spec, double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("renewal_V: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (const auto* s = std::get_if<Stable>(&spec.family)) {
    return std::pow(x, s->alpha) / std::tgamma(1.0 + s->alpha);
  }
  return renewal_V_laplace(spec, x);
}

RenewalFunction::RenewalFunction(BernsteinSpec spec, std::optional<RenewalMethod> method,
                                 RenewalTableOptions opts)
    : spec_(std::move(spec)), opts_(opts) {
  spec_.validate();
  method_ = method.value_or(spec_.is_stable() ? RenewalMethod::StableClosedForm : RenewalMethod::LaplaceInversion);
  if (method_ == RenewalMethod::StableClosedForm && !spec_.is_stable()) {
    throw ArgumentError("RenewalFunction: closed form only exists for the stable family");
  }
  const int n = static_cast<int>(std::lround(std::log10(opts_.x_max / opts_.x_min) * opts_.points_per_decade)) + 1;
  xs_ = log_grid(opts_.x_min, opts_.x_max, n);
  values_.resize(xs_.size());
  double running = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    double v = method_ == RenewalMethod::StableClosedForm ? renewal_V(spec_, xs_[i])
                                                          : renewal_V_laplace(spec_, xs_[i]);
    if (!(v > 0.0) || v < running * (1.0 - opts_.monotone_tolerance)) {
      std::ostringstream os;
      os << "renewal_V: Laplace inversion not monotone at x = " << xs_[i] << " (value " << v
         << ", previous " << running << ")";
      throw NumericError(os.str(), running > 0.0 ? 1.0 - v / running : 1.0);
    }
    running = std::max(running, v);
    values_[i] = running;
  }
  std::vector<double> logs(values_.size());
  std::transform(values_.begin(), values_.end(), logs.begin(), [](double v) { return std::log(v); });
  const double step = (std::log(opts_.x_max) - std::log(opts_.x_min)) / static_cast<double>(n - 1);
  low_exponent_ = (logs[1] - logs[0]) / step;
  high_exponent_ = (logs[logs.size() - 1] - logs[logs.size() - 2]) / step;
  spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(logs.begin(), logs.end(),
                                                                         std::log(opts_.x_min), step);
}

double RenewalFunction::operator()(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("renewal_V: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (method_ == RenewalMethod::StableClosedForm) return renewal_V(spec_, x);
  if (x <= opts_.x_min) return values_.front() * std::pow(x / opts_.x_min, low_exponent_);
  if (x >= opts_.x_max) return values_.back() * std::pow(x / opts_.x_max, high_exponent_);
  return std::exp(spline_(std::log(x)));
}

double RenewalFunction::comparison_constant() const {
  double worst = 1.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double ratio = values_[i] / surrogate(xs_[i]);
    worst = std::max({worst, ratio, 1.0 / ratio});
  }
  return worst;
}

void RenewalFunction::write_csv(std::ostream& os) const {
  os << "x,V,surrogate\n";
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    os << format_double(xs_[i]) << ',' << format_double(values_[i]) << ',' << format_double(surrogate(xs_[i]))
       << '\n';
  }
}

}  // namespace levylab
