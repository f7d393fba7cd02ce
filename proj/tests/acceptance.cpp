// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "levylab/bernstein.hpp"
#include "levylab/config.hpp"
#include "levylab/experiments.hpp"
#include "levylab/renewal.hpp"
#include "levylab/solver.hpp"

using namespace levylab;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

ExperimentConfig config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Every run is kept so criterion 10 can repeat it.
std::vector<std::pair<ExperimentConfig, Artifacts>> history;

const Artifacts& remember(const ExperimentConfig& cfg) {
  history.emplace_back(cfg, run_experiment(cfg));
  return history.back().second;
}

const std::string no_field = "[experiment]\nwrite_field = false\n";

Verdict symbol_identity() {
  Verdict v{true, ""};
  for (const char* fam : {"family = stable\nalpha = 0.5\n", "family = relativistic\nalpha = 0.5\nmass = 1\n"}) {
    const auto& r = remember(config(std::string("[bernstein]\n") + fam + "[experiment]\nid = symbol-check\n")).report;
    const double e1 = r["levels"][0]["max_rel_symbol_error"];
    const double a1 = r["levels"][0]["max_rel_applied_error"];
    const double e2 = r["levels"][1]["max_rel_symbol_error"];
    v.pass = v.pass && r["pass"].get<bool>();
    v.detail += r["bernstein"].get<std::string>() + " err " + fmt(std::max(e1, a1)) + " -> " + fmt(e2) + "; ";
  }
  return v;
}

Verdict ladder_renewal() {
  double worst_ladder = 0.0, worst_V = 0.0;
  for (double a : {0.25, 0.5, 0.75}) {
    const auto spec = make_stable(a);
    for (double x : {0.1, 1.0, 10.0}) {
      const double xa = std::pow(x, a);
      worst_ladder = std::max(worst_ladder, std::fabs(ladder_exponent(spec, x) - xa) / xa);
      // the inversion path, not the closed form the library would pick
      worst_V = std::max(worst_V, std::fabs(renewal_V_laplace(spec, x) - xa / std::tgamma(1.0 + a)) / (1.0 + xa));
    }
  }
  return {worst_ladder <= 1e-4 && worst_V <= 1e-6,
          "ladder rel err " + fmt(worst_ladder) + " (<= 1e-4), renewal scaled err " + fmt(worst_V) + " (<= 1e-6)"};
}

Verdict kernel_audit() {
  Verdict v{true, ""};
  for (const char* a : {"0.25", "0.5", "0.75"}) {
    const auto& r =
        remember(config(std::string("[bernstein]\nalpha = ") + a + "\n[experiment]\nid = kernel-audit\n")).report;
    v.pass = v.pass && r["pass"].get<bool>();
    v.detail += std::string("a=") + a + " slope " + fmt(r["slope"]["fitted"]) + " b2 " + fmt(r["bounds"][0]["b2"]) +
                " C " + fmt(r["bounds"][0]["C"]) + " drift " + fmt(r["refinement_drift"]) + "; ";
  }
  return v;
}

Verdict torsion() {
  const auto& r = remember(config("[montecarlo]\nn_paths = 100000\ndt = 1e-4\nseed = 1\n" + no_field)).report;
  const auto& d = r["deterministic"];
  const auto& mc = r["montecarlo"];
  const bool det_ok = d["rel_error"].get<double>() <= 0.02;
  const bool mc_ok = std::fabs(mc["z_score"].get<double>()) <= 3.0 && mc["censored_fraction"].get<double>() < 1e-3;
  return {det_ok && mc_ok, "u(0) " + fmt(d["u"]) + " vs 2/pi (rel " + fmt(d["rel_error"]) + "); MC " +
                               fmt(mc["mean"]) + " +- " + fmt(mc["stderr"]) + " (z " + fmt(mc["z_score"]) +
                               ", censored " + fmt(mc["censored_fraction"]) + ")"};
}

Verdict trace_dichotomy() {
  const auto& ball = remember(config("[experiment]\nid = trace\nwrite_field = false\n")).report;
  const auto& ell =
      remember(config("[domain]\nshape = ellipse\na = 1.5\nb = 1\n[experiment]\nid = trace\nwrite_field = false\n"))
          .report;
  const double cb = ball["trace"]["cv"];
  const double ce = ell["trace"]["cv"];
  return {cb <= 0.05 && ce >= 3.0 * cb,
          "ball cv " + fmt(cb) + " (<= 0.05), ellipse cv " + fmt(ce) + " = " + fmt(ce / cb) + "x ball (>= 3x)"};
}

Verdict h_monotone() {
  Verdict v{true, ""};
  const std::vector<std::string> specs{"family = stable\nalpha = 0.5\n", "family = relativistic\nalpha = 0.5\nmass = 1\n",
                                       "family = stable\nalpha = 0.25\n", "family = stable\nalpha = 0.75\n"};
  for (const auto& s : specs) {
    const auto& r = remember(config("[bernstein]\n" + s + "[experiment]\nid = h-curve\n")).report;
    v.pass = v.pass && r["pass"].get<bool>();
    v.detail += r["bernstein"].get<std::string>() + (r["strictly_increasing"].get<bool>() ? " increasing" : " NOT increasing");
    if (r["doubling"].is_array()) {
      double worst = 0.0;
      for (const auto& d : r["doubling"]) worst = std::max(worst, std::fabs(d["ratio"].get<double>() / d["expected"].get<double>() - 1.0));
      v.detail += ", doubling off 2^a by " + fmt(worst);
    }
    v.detail += "; ";
  }
  return v;
}

Verdict moving_planes() {
  const auto& r = remember(config("[experiment]\nid = moving-plane\nplanes = 10\nwrite_field = false\n")).report;
  const double mn = r["min_v_relative"];
  const double centre = r["center_plane_sup_relative"];
  return {r["pass"].get<bool>() && r["directions"].size() == 8,
          "8 directions x 10 planes: min v / |u| " + fmt(mn) + " (>= -5e-3), center plane " + fmt(centre) +
              " (<= 1e-3)"};
}

Verdict annulus() {
  const auto& r = remember(config(
                               "[domain]\nshape = annulus\nr_in = 0.4\nr_out = 1\n[semilinear]\ninner_value = 1\n"
                               "[experiment]\nid = annulus\nsource = 0\nwrite_field = false\n"))
                      .report;
  const auto& rm = r["radial_monotonicity"];
  return {r["pass"].get<bool>(), std::to_string(rm["bins"].get<int>()) + " bins, worst increase " +
                                     fmt(rm["worst_violation"]) + ", worst along rays " + fmt(r["worst_ray_increase"])};
}

// Discrete maximum principle on random data, three kinds of instance in turn:
// f >= 0, g >= 0 gives u >= 0; f <= 0 gives max_D u <= max g^+; f = 0 keeps u
// between the extremes of the exterior data (and the zero beyond the box).
Verdict maximum_principle() {
  auto grid = std::make_shared<const DomainGrid>(Ball{1.0}, 1.0 / 32);
  const JumpKernel kernel(make_stable(0.5), 2);
  const auto op = assemble(*grid, kernel);
  const bool m_matrix = check_m_matrix(*op).pass;
  std::mt19937_64 rng(20241016);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int kind = trial % 3;
    const double fa = 5.0 * unif(rng), ga = 2.0 * unif(rng);
    Field f(grid), g(grid);
    for (auto& x : f.values) x = kind == 0 ? fa * unif(rng) : kind == 1 ? -fa * unif(rng) : 0.0;
    for (auto& x : g.values) x = kind == 2 ? ga * (2.0 * unif(rng) - 1.0) : ga * unif(rng);
    double g_lo = 0.0, g_hi = 0.0;
    for (std::size_t k = 0; k < grid->size(); ++k) {
      if (grid->inside(k)) continue;
      g_lo = std::min(g_lo, g.values[k]);
      g_hi = std::max(g_hi, g.values[k]);
    }
    const Field u = solve_linear(*op, f, g);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k : grid->interior()) {
      lo = std::min(lo, u.values[k]);
      hi = std::max(hi, u.values[k]);
    }
    // CG stops at a 1e-10 relative residual; allow that much slack
    const double slack = 1e-9 * std::max(1.0, u.max_abs());
    double violation = 0.0;
    if (kind == 0) violation = -lo;
    if (kind == 1) violation = hi - g_hi;
    if (kind == 2) violation = std::max(g_lo - lo, hi - g_hi);
    worst = std::max(worst, violation);
    if (violation > slack) ++failures;
  }
  return {m_matrix && failures == 0, "M-matrix " + std::string(m_matrix ? "yes" : "no") + ", " +
                                         std::to_string(100 - failures) + "/100 instances hold, worst violation " +
                                         fmt(worst)};
}

std::string payload(const Artifacts& a) {
  std::string s = a.report.dump(2);
  for (const auto& [name, contents] : a.files) s += name + contents;
  return s;
}

Verdict determinism() {
  int same = 0, total = 0;
  std::string differing;
  for (const auto& [cfg, first] : history) {
    ++total;
    if (payload(run_experiment(cfg)) == payload(first)) {
      ++same;
    } else {
      differing += cfg.experiment + " ";
    }
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " runs byte-identical on repeat" +
                             (differing.empty() ? "" : " (differ: " + differing + ")")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"symbol identity", symbol_identity},
      {"ladder/renewal closed forms", ladder_renewal},
      {"kernel audit", kernel_audit},
      {"torsion cross-validation", torsion},
      {"trace rigidity dichotomy", trace_dichotomy},
      {"H_r monotonicity", h_monotone},
      {"moving-plane nonnegativity", moving_planes},
      {"annulus monotonicity", annulus},
      {"maximum-principle suite", maximum_principle},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%zu] %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
