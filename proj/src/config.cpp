#include "levylab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/io.hpp"

namespace levylab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  std::ostringstream os;
  os << "key '" << key << "': cannot read '" << value << "' as " << expected;
  throw ConfigError(os.str());
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  bad_value(key, v, "a number");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an unsigned integer");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) bad_value(key, v, "a comma-separated list");
  return out;
}

// Raw parameters, resolved into the typed config once the whole file is read.
struct Raw {
  std::string family = "stable";
  double alpha = 0.5, mass = 1.0, alpha1 = 0.3, w1 = 1.0, alpha2 = 0.7, w2 = 1.0;
  int dim = 2;
  std::string shape = "ball";
  double radius = 1.0, a = 1.5, b = 1.0, r_in = 0.4, r_out = 1.0, asymmetry = 0.3;
};

using Setter = std::function<void(const std::string&, const std::string&)>;

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"symbol-check", "kernel-audit", "renewal-audit", "torsion",   "trace",
                                            "h-curve",      "moving-plane", "annulus",       "semilinear"};
  return ids;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  Raw raw;
  std::map<std::string, std::map<std::string, Setter>> table;
  auto num = [](double& dst) { return [&dst](const std::string& k, const std::string& v) { dst = to_double(k, v); }; };
  auto& bern = table["bernstein"];
  bern["family"] = [&](const std::string&, const std::string& v) { raw.family = v; };
  bern["alpha"] = num(raw.alpha);
  bern["mass"] = num(raw.mass);
  bern["alpha1"] = num(raw.alpha1);
  bern["w1"] = num(raw.w1);
  bern["alpha2"] = num(raw.alpha2);
  bern["w2"] = num(raw.w2);
  bern["dim"] = [&](const std::string& k, const std::string& v) { raw.dim = to_int(k, v); };
  auto& dom = table["domain"];
  dom["shape"] = [&](const std::string&, const std::string& v) { raw.shape = v; };
  dom["radius"] = num(raw.radius);
  dom["a"] = num(raw.a);
  dom["b"] = num(raw.b);
  dom["r_in"] = num(raw.r_in);
  dom["r_out"] = num(raw.r_out);
  dom["asymmetry"] = num(raw.asymmetry);
  auto& grid = table["grid"];
  grid["h"] = num(cfg.h);
  grid["bbox_scale"] = num(cfg.bbox_scale);
  auto& mc = table["montecarlo"];
  mc["enabled"] = [&](const std::string& k, const std::string& v) { cfg.mc_enabled = to_bool(k, v); };
  mc["n_paths"] = [&](const std::string& k, const std::string& v) { cfg.mc.n_paths = to_u64(k, v); };
  mc["dt"] = num(cfg.mc.dt);
  mc["seed"] = [&](const std::string& k, const std::string& v) { cfg.mc.seed = to_u64(k, v); };
  mc["max_time"] = num(cfg.mc.max_time);
  mc["samples_csv"] = [&](const std::string& k, const std::string& v) { cfg.mc_samples_csv = to_bool(k, v); };
  auto& exp = table["experiment"];
  exp["id"] = [&](const std::string&, const std::string& v) { cfg.experiment = v; };
  exp["output"] = [&](const std::string&, const std::string& v) { cfg.output = v; };
  exp["boundary_points"] = [&](const std::string& k, const std::string& v) { cfg.boundary_points = to_int(k, v); };
  exp["radii"] = [&](const std::string& k, const std::string& v) { cfg.radii = to_list(k, v); };
  exp["cells_per_radius"] = num(cfg.cells_per_radius);
  exp["planes"] = [&](const std::string& k, const std::string& v) { cfg.planes = to_int(k, v); };
  exp["source"] = num(cfg.source);
  exp["write_field"] = [&](const std::string& k, const std::string& v) { cfg.write_field = to_bool(k, v); };
  auto& semi = table["semilinear"];
  semi["c0"] = num(cfg.c0);
  semi["c1"] = num(cfg.c1);
  semi["omega"] = num(cfg.omega);
  semi["inner_value"] = num(cfg.inner_value);

  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::ostringstream where;
    where << "line " << lineno << ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where.str() + "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!table.count(section)) throw ConfigError(where.str() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where.str() + "expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where.str() + "key '" + key + "' appears before any [section]");
    const auto& keys = table[section];
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(where.str() + "unknown key '" + key + "' in [" + section + "]");
    try {
      it->second(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where.str() + e.what());
    }
  }

  try {
    if (raw.family == "stable") {
      cfg.spec = make_stable(raw.alpha, raw.dim);
    } else if (raw.family == "relativistic") {
      cfg.spec = make_relativistic(raw.alpha, raw.mass, raw.dim);
    } else if (raw.family == "sum-of-stables") {
      cfg.spec = make_sum_of_stables(raw.alpha1, raw.w1, raw.alpha2, raw.w2, raw.dim);
    } else {
      throw ConfigError("unknown bernstein family '" + raw.family + "' (stable, relativistic, sum-of-stables)");
    }
    if (raw.dim != 2) throw ConfigError("only dim = 2 is supported by the grid solver");
    if (raw.shape == "ball") {
      cfg.shape = Ball{raw.radius};
    } else if (raw.shape == "ellipse") {
      cfg.shape = Ellipse{raw.a, raw.b};
    } else if (raw.shape == "annulus") {
      cfg.shape = Annulus{raw.r_in, raw.r_out};
    } else if (raw.shape == "egg") {
      cfg.shape = Egg{raw.asymmetry};
    } else {
      throw ConfigError("unknown shape '" + raw.shape + "' (ball, ellipse, annulus, egg)");
    }
    validate_shape(cfg.shape);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  if (std::find(experiment_ids().begin(), experiment_ids().end(), cfg.experiment) == experiment_ids().end()) {
    throw ConfigError("unknown experiment id '" + cfg.experiment + "' (see list-experiments)");
  }
  if (!(cfg.h > 0.0) || !(cfg.bbox_scale >= 1.0)) throw ConfigError("grid needs h > 0 and bbox_scale >= 1");
  if (!(cfg.mc.dt > 0.0) || cfg.mc.n_paths < 1 || !(cfg.mc.max_time > 0.0)) {
    throw ConfigError("montecarlo needs dt > 0, n_paths >= 1, max_time > 0");
  }
  if (cfg.boundary_points < 16) throw ConfigError("boundary_points must be at least 16");
  if (cfg.planes < 1) throw ConfigError("planes must be positive");
  if (!(cfg.omega > 0.0 && cfg.omega <= 1.0)) throw ConfigError("omega must lie in (0, 1]");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

std::string config_echo(const ExperimentConfig& cfg) {
  std::ostringstream os;
  auto d = [](double x) { return format_double(x); };
  os << "[bernstein]\n";
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Stable>) {
          os << "family = stable\nalpha = " << d(f.alpha) << '\n';
        } else if constexpr (std::is_same_v<T, RelativisticStable>) {
          os << "family = relativistic\nalpha = " << d(f.alpha) << "\nmass = " << d(f.mass) << '\n';
        } else {
          os << "family = sum-of-stables\nalpha1 = " << d(f.alpha1) << "\nw1 = " << d(f.w1)
             << "\nalpha2 = " << d(f.alpha2) << "\nw2 = " << d(f.w2) << '\n';
        }
      },
      cfg.spec.family);
  os << "dim = " << cfg.spec.dim << "\n\n[domain]\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          os << "shape = ball\nradius = " << d(s.radius) << '\n';
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          os << "shape = ellipse\na = " << d(s.a) << "\nb = " << d(s.b) << '\n';
        } else if constexpr (std::is_same_v<T, Annulus>) {
          os << "shape = annulus\nr_in = " << d(s.r_in) << "\nr_out = " << d(s.r_out) << '\n';
        } else {
          os << "shape = egg\nasymmetry = " << d(s.asymmetry) << '\n';
        }
      },
      cfg.shape);
  os << "\n[grid]\nh = " << d(cfg.h) << "\nbbox_scale = " << d(cfg.bbox_scale) << "\n\n";
  os << "[montecarlo]\nenabled = " << (cfg.mc_enabled ? "true" : "false") << "\nn_paths = " << cfg.mc.n_paths
     << "\ndt = " << d(cfg.mc.dt) << "\nseed = " << cfg.mc.seed << "\nmax_time = " << d(cfg.mc.max_time)
     << "\nsamples_csv = " << (cfg.mc_samples_csv ? "true" : "false") << "\n\n";
  os << "[experiment]\nid = " << cfg.experiment << "\noutput = " << cfg.output
     << "\nboundary_points = " << cfg.boundary_points << "\nradii = ";
  for (std::size_t k = 0; k < cfg.radii.size(); ++k) os << (k ? "," : "") << d(cfg.radii[k]);
  os << "\ncells_per_radius = " << d(cfg.cells_per_radius) << "\nplanes = " << cfg.planes
     << "\nwrite_field = " << (cfg.write_field ? "true" : "false") << "\nsource = " << d(cfg.source) << "\n\n";
  os << "[semilinear]\nc0 = " << d(cfg.c0) << "\nc1 = " << d(cfg.c1) << "\nomega = " << d(cfg.omega)
     << "\ninner_value = " << d(cfg.inner_value) << '\n';
  return os.str();
}

}  // namespace levylab
