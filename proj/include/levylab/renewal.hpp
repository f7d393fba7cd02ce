#pragma once

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

#include "levylab/bernstein.hpp"

namespace levylab {

enum class RenewalMethod { LaplaceInversion, StableClosedForm };

/// Renewal function of the ascending ladder-height process: x^a/Gamma(1+a)
/// for Stable(a), Gaver-Stehfest inversion of 1/(s Psi~(s)) otherwise.
/// V(x) = 0 for x <= 0.
double renewal_V(const BernsteinSpec& spec, double x);

/// Always inverts the Laplace transform, whatever the family.
double renewal_V_laplace(const BernsteinSpec& spec, double x);

/// Psi(r^-2)^{-1/2}, the two-sided comparison function for V.
double surrogate_V(const BernsteinSpec& spec, double r);

/// Gaver-Stehfest inversion f(x) ~ (ln2/x) sum_k c_k F(k ln2 / x) of order
/// `order` (even), accumulated in extended precision.
template <class F>
long double gaver_stehfest(F&& transform, long double x, int order = 14);
const std::vector<long double>& stehfest_coefficients(int order);

struct RenewalTableOptions {
  double x_min = 1e-3;
  double x_max = 1e3;
  int points_per_decade = 8;
  // Relative dip below the running maximum tolerated before the inversion
  // is declared unstable.
  double monotone_tolerance = 1e-6;
};

/// Tabulated V on a log-spaced grid with log-log cubic interpolation and
/// power-law continuation beyond either end. Evaluation is thread-safe.
class RenewalFunction {
public:
  explicit RenewalFunction(BernsteinSpec spec, std::optional<RenewalMethod> method = std::nullopt,
                           RenewalTableOptions opts = {});

  double operator()(double x) const;
  double surrogate(double r) const { return surrogate_V(spec_, r); }

  RenewalMethod method() const { return method_; }
  const BernsteinSpec& spec() const { return spec_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return values_; }

  /// max over the table of max(ratio, 1/ratio) with ratio = V/surrogate.
  double comparison_constant() const;

  /// Columns x, V, surrogate.
  void write_csv(std::ostream& os) const;

private:
  BernsteinSpec spec_;
  RenewalMethod method_;
  RenewalTableOptions opts_;
  std::vector<double> xs_;
  std::vector<double> values_;
  double low_exponent_ = 0.0;
  double high_exponent_ = 0.0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

template <class F>
long double gaver_stehfest(F&& transform, long double x, int order) {
  const auto& c = stehfest_coefficients(order);
  const long double ln2 = 0.693147180559945309417232121458176568L;
  const long double a = ln2 / x;
  long double acc = 0.0L;
  for (int k = 1; k <= order; ++k) acc += c[static_cast<std::size_t>(k - 1)] * transform(k * a);
  return a * acc;
}

}  // namespace levylab
