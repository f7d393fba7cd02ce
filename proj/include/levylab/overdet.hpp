#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levylab/domain.hpp"
#include "levylab/montecarlo.hpp"
#include "levylab/renewal.hpp"
#include "levylab/solver.hpp"

namespace levylab {

struct TraceOptions {
  double t_min_cells = 4.0;
  double t_max_cells = 16.0;
  int ladder_points = 8;
};

/// Geometric ladder of `n` values in [lo, hi].
std::vector<double> trace_ladder(double lo, double hi, int n);

struct TraceFit {
  double trace = 0.0;     // least-squares constant through the ratios
  double residual = 0.0;  // rms deviation of the ratios from it
  double lower = 0.0;     // smallest ratio (Hopf-type lower bound)
  std::vector<double> t;
  std::vector<double> ratio;  // u(p - t eta) / V(t)
};

/// Samples u(p - t eta) / V(t) on the ladder t in [t_min_cells h, t_max_cells h];
/// ladder points leaving the domain are skipped, fewer than four remaining is
/// a geometry error.
TraceFit boundary_trace(const PointFunction& u, const Shape& shape, const RenewalFunction& V, Point p, Point eta,
                        double h, const TraceOptions& opts = {});
TraceFit boundary_trace(const Field& u, const RenewalFunction& V, Point p, Point eta, const TraceOptions& opts = {});

struct TracePoint {
  int index = 0;
  double angle = 0.0;
  int component = 0;
  Point point{};
  Point normal{};
  double trace = 0.0;
  double residual = 0.0;
  double lower = 0.0;
};

struct TraceProfile {
  std::vector<TracePoint> points;
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Fitted traces at `per_component` equally spaced points on every boundary component.
TraceProfile trace_profile(const Field& u, const RenewalFunction& V, int per_component = 32,
                           const TraceOptions& opts = {});
TraceProfile trace_profile(const PointFunction& u, const Shape& shape, const RenewalFunction& V, double h,
                           int per_component = 32, const TraceOptions& opts = {});

struct TraceStats {
  double mean = 0.0;
  double cv = 0.0;  // population standard deviation over |mean|; 0 when the mean vanishes
};
TraceStats trace_constancy(const TraceProfile& profile);

/// Columns index, angle, trace, residual.
void write_trace_csv(std::ostream& os, const TraceProfile& profile);

/// min over the fit window of u(p - t eta) / V(t).
double hopf_probe(const Field& u, const RenewalFunction& V, Point p, Point eta, const TraceOptions& opts = {});
double hopf_probe(const PointFunction& u, const Shape& shape, const RenewalFunction& V, Point p, Point eta, double h,
                  const TraceOptions& opts = {});

struct HValue {
  double r = 0.0;
  double H = 0.0;   // mean trace of the torsion function of Ball(r)
  double cv = 0.0;
};

/// Torsion traces on Ball(r) for each radius, on grids with h = r / cells_per_radius.
std::vector<HValue> h_curve(const JumpKernel& kernel, const RenewalFunction& V, const std::vector<double>& radii,
                            double cells_per_radius = 64.0, const TraceOptions& opts = {});
std::vector<HValue> h_curve(const BernsteinSpec& spec, const std::vector<double>& radii,
                            double cells_per_radius = 64.0);

// ---- moving planes ----------------------------------------------------------

/// Reflection across the hyperplane {x . e = lambda}, e a unit vector.
Point reflect(Point x, Point e, double lambda);

/// Nearest lambda to `target` for which the reflection maps grid nodes to grid
/// nodes (e must be an axis or a diagonal lattice direction).
double snap_plane(const DomainGrid& grid, Point e, double target);

/// The eight lattice directions: axes first, then diagonals.
std::vector<Point> lattice_directions();

/// Largest lambda at which the reflected cap R(D cap {x . e > lambda}) leaves
/// the closure of D, found by sweeping lambda downwards from the support value.
double critical_plane(const Shape& shape, Point e, int boundary_samples = 4096);

struct PlaneResult {
  double lambda = 0.0;
  double min_v = 0.0;
  double max_v = 0.0;
  std::size_t nodes = 0;
  bool past_critical = false;
};

struct PlaneScan {
  Point e{};
  double critical_lambda = 0.0;
  std::vector<PlaneResult> planes;
};

/// For each lambda: v(x) = u(x) - u(R x) over the grid nodes x of the reflected
/// cap R(D cap {x . e > lambda}), u(R x) by bilinear interpolation.
PlaneScan moving_plane_scan(const Field& u, Point e, const std::vector<double>& lambdas);

// ---- radial structure --------------------------------------------------------

struct RadialVerdict {
  bool pass = false;
  double worst_violation = 0.0;  // max over consecutive bins of mean[k+1] - mean[k]
  std::size_t bins = 0;
};

struct RadialBin {
  double r = 0.0;  // bin midpoint
  double mean = 0.0;
  std::size_t count = 0;
};

/// Mean of u over inside nodes with |x - center| > r_skip, in radial bins of
/// width bin_cells * h; empty bins are dropped.
std::vector<RadialBin> radial_profile(const Field& u, Point center, double r_skip = 0.0, double bin_cells = 1.0);

/// Bins inside nodes with |x - center| > r_skip by radius (width bin_cells * h)
/// and checks that bin means strictly decrease outwards.
RadialVerdict radial_monotonicity(const Field& u, Point center, double r_skip = 0.0, double bin_cells = 1.0);

// ---- corner probes -----------------------------------------------------------

struct DiagonalDecay {
  bool identically_zero = false;
  double slope = 0.0;  // of log|v| against log(V(t) t)
  std::vector<double> t;
  std::vector<double> ratio;  // v / (V(t) t)
};

DiagonalDecay diagonal_decay_probe(const PointFunction& v, const RenewalFunction& V, Point corner, Point direction,
                                   double h, const TraceOptions& opts = {});
DiagonalDecay diagonal_decay_probe(const Field& v, const RenewalFunction& V, Point corner, Point direction,
                                   const TraceOptions& opts = {});

// ---- summaries ---------------------------------------------------------------

struct DirectionMinimum {
  Point e{};
  double min_v = 0.0;  // over the scanned planes, relative to max|u|
};

struct RigidityReport {
  std::string shape;
  double trace_mean = 0.0;
  double trace_cv = 0.0;
  std::optional<double> h_value;  // balls only
  std::vector<DirectionMinimum> moving_plane;
  std::optional<RadialVerdict> radial;
};

nlohmann::json to_json(const RigidityReport& report);

}  // namespace levylab
