#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include "levylab/bernstein.hpp"
#include "levylab/domain.hpp"

namespace levylab {

using Rng = std::mt19937_64;

struct PathConfig {
  double dt = 1e-4;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  double max_time = 100.0;
};

struct ExitSample {
  double tau = 0.0;
  Point x_exit{};
  double integral_f = 0.0;
  bool censored = false;
};

/// Independent stream for path `index` of a run seeded with `seed`.
Rng path_rng(std::uint64_t seed, std::uint64_t index);

/// S_dt with E exp(-l S_dt) = exp(-dt Psi(l)). Exact for every family:
/// Kanter's representation for stable laws, exponential tilting by
/// rejection for the relativistic family, a sum of two independent stable
/// draws for SumOfStables.
double sample_subordinator(const BernsteinSpec& spec, double dt, Rng& rng);

/// X_dt = B(S_dt) with Brownian covariance 2 t Id, in dimension 2.
Point sample_increment(const BernsteinSpec& spec, double dt, Rng& rng);

using PointFunction = std::function<double(Point)>;

/// Simulates paths from x0 until the first time step landing outside the
/// (continuous) shape, accumulating int f(X_s) ds by the left-endpoint rule.
std::vector<ExitSample> mc_exit(const BernsteinSpec& spec, const Shape& shape, Point x0, const PointFunction& f,
                                const PathConfig& cfg);
std::vector<ExitSample> mc_exit(const BernsteinSpec& spec, const DomainGrid& domain, Point x0, const Field& f,
                                const PathConfig& cfg);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  double censored_fraction = 0.0;
  std::size_t n = 0;
};

/// Feynman-Kac estimate of u(x0) for Psi(-Delta) u = f in D, u = g outside:
/// u(x0) = E[g(X_tau)] + E[int_0^tau f(X_s) ds].
McEstimate mc_dirichlet(const BernsteinSpec& spec, const Shape& shape, const PointFunction& g, const PointFunction& f,
                        Point x0, const PathConfig& cfg);

/// Mean and standard error of integral_f (the exit time when f = 1).
McEstimate summarize_integral(const std::vector<ExitSample>& samples);

/// Columns tau, x_exit, y_exit, integral_f, censored.
void write_samples_csv(std::ostream& os, const std::vector<ExitSample>& samples);

}  // namespace levylab
