#pragma once

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <iosfwd>
#include <vector>

#include "levylab/bernstein.hpp"

namespace levylab {

/// j(r) = int_0^inf (4 pi t)^{-d/2} exp(-r^2/(4t)) m(dt), by direct quadrature.
double levy_density(const BernsteinSpec& spec, int dim, double r);

/// log j(r); stays finite where j itself underflows (exponential tails).
double log_levy_density(const BernsteinSpec& spec, int dim, double r);

struct KernelTableOptions {
  double r_min = 1e-3;
  double r_max = 1e3;
  int points_per_decade = 64;
};

/// Radial jump density of the subordinate Brownian motion, tabulated on a
/// log-spaced grid and interpolated by a cubic B-spline in log-log
/// coordinates. Outside the table it continues as the power laws fitted at
/// either end. Immutable after construction.
class JumpKernel {
public:
  JumpKernel(BernsteinSpec spec, int dim, KernelTableOptions opts = {});

  double operator()(double r) const { return std::exp(log_value(r)); }
  double log_value(double r) const;

  const BernsteinSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  double r_min() const { return opts_.r_min; }
  double r_max() const { return opts_.r_max; }
  int points_per_decade() const { return opts_.points_per_decade; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& log_values() const { return log_j_; }
  double origin_exponent() const { return origin_exponent_; }
  double tail_exponent() const { return tail_exponent_; }

  /// int_{|z| > R} j(|z|) dz in R^dim.
  double tail_mass(double R) const;
  /// int_{a < |z| < b} |z|^2 j(|z|) dz in R^dim.
  double shell_second_moment(double a, double b) const;

  /// Columns r, j.
  void write_csv(std::ostream& os) const;

private:
  BernsteinSpec spec_;
  int dim_;
  KernelTableOptions opts_;
  std::vector<double> radii_;
  std::vector<double> log_j_;
  double origin_exponent_ = 0.0;
  double tail_exponent_ = 0.0;
  double log_r_min_ = 0.0;
  double log_r_max_ = 0.0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

struct KernelBoundsReport {
  double b2_fitted = 0.0;  // sup_{r >= 1} j(r)/j(r+1)
  double C_fitted = 0.0;   // sup_r j(r) r^d / Psi(r^-2)
  double b2_argmax = 0.0;
  double C_argmax = 0.0;
  bool pass = false;
};

KernelBoundsReport check_kernel_bounds(const JumpKernel& kernel);

/// Least-squares slope of log j against log r at n log-spaced radii in [lo, hi].
double fitted_loglog_slope(const JumpKernel& kernel, double lo, double hi, int n = 64);

/// Surface area of the unit sphere S^{d-1}.
double sphere_area(int dim);

}  // namespace levylab
