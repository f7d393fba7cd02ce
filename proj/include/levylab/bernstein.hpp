#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace levylab {

// Psi(l) = l^alpha
struct Stable {
  double alpha;
};

// Psi(l) = (l + m^{1/alpha})^alpha - m
struct RelativisticStable {
  double alpha;
  double mass;
};

// Psi(l) = w1 l^alpha1 + w2 l^alpha2
struct SumOfStables {
  double alpha1;
  double w1;
  double alpha2;
  double w2;
};

using BernsteinFamily = std::variant<Stable, RelativisticStable, SumOfStables>;

/// Laplace exponent of a subordinator from the closed catalogue, together
/// with the spatial dimension of the Brownian motion it time-changes.
struct BernsteinSpec {
  BernsteinFamily family;
  int dim = 2;

  /// Throws ArgumentError when parameters leave their admissible ranges.
  void validate() const;
  std::string name() const;
  bool is_stable() const { return std::holds_alternative<Stable>(family); }
};

BernsteinSpec make_stable(double alpha, int dim = 2);
BernsteinSpec make_relativistic(double alpha, double mass, int dim = 2);
BernsteinSpec make_sum_of_stables(double alpha1, double w1, double alpha2, double w2, int dim = 2);

/// Psi(lambda). Throws DomainError for lambda <= 0.
double eval_psi(const BernsteinSpec& spec, double lambda);

/// Psi(lambda) for lambda >= 0 (Psi(0) = 0), in extended precision.
long double psi_extended(const BernsteinSpec& spec, long double lambda);

/// Density of the subordinator's Levy measure at t > 0.
double levy_measure_density(const BernsteinSpec& spec, double t);

/// log of levy_measure_density; finite for any t > 0 even when the density
/// underflows.
double log_levy_measure_density(const BernsteinSpec& spec, double t);

struct ScalingWitness {
  double r = 0.0;
  double R = 0.0;
  double ratio = 0.0;  // Psi(R)/Psi(r)
};

struct ScalingReport {
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 1.0;
  bool satisfied = false;
  // Largest multiplicative violation over all pairs; <= 1 when satisfied.
  double worst_violation = 0.0;
  ScalingWitness witness;
};

/// Checks (1/b1)(R/r)^a1 <= Psi(R)/Psi(r) <= b1 (R/r)^a2 for every pair
/// r <= R drawn from r_grid (all entries must be >= 1).
ScalingReport check_weak_scaling(const BernsteinSpec& spec, std::span<const double> r_grid,
                                 double a1, double a2, double b1);

/// n log-spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct LadderOptions {
  int initial_panels = 256;
  int max_doublings = 8;
  double rel_tol = 1e-8;
};

/// Laplace exponent of the ascending ladder-height process of the first
/// coordinate: exp((1/pi) int_0^inf log Psi((xy)^2) / (1+y^2) dy).
double ladder_exponent(const BernsteinSpec& spec, double x, const LadderOptions& opts = {});
long double ladder_exponent_extended(const BernsteinSpec& spec, long double x,
                                     const LadderOptions& opts = {});

}  // namespace levylab
