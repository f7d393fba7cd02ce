#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "levylab/bernstein.hpp"
#include "levylab/domain.hpp"
#include "levylab/montecarlo.hpp"

namespace levylab {

/// Everything a run needs. Every field has a default, so an empty file is a
/// valid (torsion) configuration.
struct ExperimentConfig {
  BernsteinSpec spec = make_stable(0.5);
  Shape shape = Ball{1.0};
  double h = 1.0 / 64;
  double bbox_scale = 3.0;
  PathConfig mc{1e-4, 100000, 1, 100.0};
  bool mc_enabled = true;
  bool mc_samples_csv = false;

  std::string experiment = "torsion";
  std::string output = "levylab-out";

  int boundary_points = 32;
  std::vector<double> radii{0.5, 0.75, 1.0, 1.5, 2.0};
  double cells_per_radius = 64.0;
  int planes = 10;
  bool write_field = true;
  double source = 0.0;  // constant right-hand side of the annulus problem

  // Semilinear source f(u) = c0 + c1 u, and the constant held on the hole of an annulus.
  double c0 = 1.0;
  double c1 = 0.0;
  double omega = 1.0;
  double inner_value = 1.0;
};

/// Plain-text key = value lines grouped under [section] headers; '#' starts a
/// comment. Unknown sections or keys, and unparsable values, are config errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(config_echo(c)) reproduces c.
std::string config_echo(const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_ids();

}  // namespace levylab
