#include "levylab/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"
#include "levylab/parallel.hpp"

namespace levylab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform_open(Rng& rng) {
  // (0, 1), never hitting either end
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// One-sided stable law with E exp(-l S) = exp(-l^a), Kanter's representation.
double standard_stable(double a, Rng& rng) {
  const double u = std::numbers::pi * uniform_open(rng);
  const double e = -std::log(uniform_open(rng));
  const double lead = std::sin(a * u) / std::pow(std::sin(u), 1.0 / a);
  return lead * std::pow(std::sin((1.0 - a) * u) / e, (1.0 - a) / a);
}

// Rejection keeps the expected number of stable draws at exp(dt m).
constexpr double max_tilt_exponent = 20.0;

}  // namespace

Rng path_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(index + 1))};
  return Rng(seq);
}

double sample_subordinator(const BernsteinSpec& spec, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw ArgumentError("sample_subordinator: dt must be positive");
  if (const auto* s = std::get_if<Stable>(&spec.family)) {
    return std::pow(dt, 1.0 / s->alpha) * standard_stable(s->alpha, rng);
  }
  if (const auto* s = std::get_if<RelativisticStable>(&spec.family)) {
    if (dt * s->mass > max_tilt_exponent) {
      std::ostringstream os;
      os << "sample_subordinator: dt * mass = " << dt * s->mass << " makes tilted rejection impractical";
      throw CapabilityError(os.str());
    }
    const double mu = std::pow(s->mass, 1.0 / s->alpha);
    const double scale = std::pow(dt, 1.0 / s->alpha);
    for (;;) {
      const double x = scale * standard_stable(s->alpha, rng);
      if (uniform_open(rng) < std::exp(-mu * x)) return x;
    }
  }
  const auto& s = std::get<SumOfStables>(spec.family);
  return std::pow(s.w1 * dt, 1.0 / s.alpha1) * standard_stable(s.alpha1, rng) +
         std::pow(s.w2 * dt, 1.0 / s.alpha2) * standard_stable(s.alpha2, rng);
}

Point sample_increment(const BernsteinSpec& spec, double dt, Rng& rng) {
  if (spec.dim != 2) throw CapabilityError("sample_increment: only d = 2 paths are simulated");
  const double s = sample_subordinator(spec, dt, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(2.0 * s);
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  return {sd * z1, sd * z2};
}

std::vector<ExitSample> mc_exit(const BernsteinSpec& spec, const Shape& shape, Point x0, const PointFunction& f,
                                const PathConfig& cfg) {
  spec.validate();
  validate_shape(shape);
  if (!(cfg.dt > 0.0) || cfg.n_paths < 1 || !(cfg.max_time > 0.0)) {
    throw ArgumentError("mc_exit: need dt > 0, n_paths >= 1, max_time > 0");
  }
  if (!contains(shape, x0)) {
    std::ostringstream os;
    os << "mc_exit: starting point (" << x0[0] << ", " << x0[1] << ") is not inside " << shape_name(shape);
    throw DomainError(os.str());
  }
  const auto max_steps = static_cast<std::uint64_t>(std::ceil(cfg.max_time / cfg.dt));
  std::vector<ExitSample> out(cfg.n_paths);
  parallel_for(cfg.n_paths, [&](std::size_t p) {
    Rng rng = path_rng(cfg.seed, p);
    Point x = x0;
    double integral = 0.0;
    ExitSample& sample = out[p];
    for (std::uint64_t step = 1;; ++step) {
      if (f) integral += f(x) * cfg.dt;
      const Point d = sample_increment(spec, cfg.dt, rng);
      x = {x[0] + d[0], x[1] + d[1]};
      if (!contains(shape, x)) {
        sample.tau = static_cast<double>(step) * cfg.dt;
        break;
      }
      if (step >= max_steps) {
        sample.tau = cfg.max_time;
        sample.censored = true;
        break;
      }
    }
    sample.x_exit = x;
    sample.integral_f = integral;
  });
  return out;
}

std::vector<ExitSample> mc_exit(const BernsteinSpec& spec, const DomainGrid& domain, Point x0, const Field& f,
                                const PathConfig& cfg) {
  return mc_exit(spec, domain.shape(), x0, [&](Point p) { return f.interpolate(p); }, cfg);
}

namespace {

McEstimate summarize(const std::vector<double>& values, std::size_t censored) {
  McEstimate est;
  est.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(est.n);
  double ss = 0.0;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  est.stderr_ = est.n > 1 ? std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n)) : 0.0;
  est.censored_fraction = static_cast<double>(censored) / static_cast<double>(est.n);
  return est;
}

}  // namespace

McEstimate summarize_integral(const std::vector<ExitSample>& samples) {
  std::vector<double> v(samples.size());
  std::size_t censored = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    v[k] = samples[k].integral_f;
    censored += samples[k].censored ? 1 : 0;
  }
  return summarize(v, censored);
}

McEstimate mc_dirichlet(const BernsteinSpec& spec, const Shape& shape, const PointFunction& g, const PointFunction& f,
                        Point x0, const PathConfig& cfg) {
  const auto samples = mc_exit(spec, shape, x0, f, cfg);
  std::vector<double> v(samples.size());
  std::size_t censored = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    v[k] = samples[k].integral_f + (g && !samples[k].censored ? g(samples[k].x_exit) : 0.0);
    censored += samples[k].censored ? 1 : 0;
  }
  return summarize(v, censored);
}

void write_samples_csv(std::ostream& os, const std::vector<ExitSample>& samples) {
  os << "tau,x_exit,y_exit,integral_f,censored\n";
  for (const auto& s : samples) {
    os << format_double(s.tau) << ',' << format_double(s.x_exit[0]) << ',' << format_double(s.x_exit[1]) << ','
       << format_double(s.integral_f) << ',' << (s.censored ? 1 : 0) << '\n';
  }
}

}  // namespace levylab
