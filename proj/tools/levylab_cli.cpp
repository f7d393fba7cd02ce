#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>

#include "levylab/config.hpp"
#include "levylab/errors.hpp"
#include "levylab/experiments.hpp"

namespace {

// Exit status per error kind; usage errors are left to CLI11.
int exit_code(const levylab::Error& e) {
  const std::string kind = e.kind();
  if (kind == "config error") return 2;
  if (kind == "argument error") return 3;
  if (kind == "domain error") return 4;
  if (kind == "geometry error") return 5;
  if (kind == "numeric error") return 6;
  if (kind == "capability error") return 7;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levylab: Dirichlet problems for subordinate Brownian motions on planar domains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("--config", config_path, "key = value config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides [experiment] output)");
  run->add_option("--seed", seed, "Monte Carlo seed (overrides [montecarlo] seed)");

  app.add_subcommand("list-experiments", "list experiment ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-experiments")) {
      std::cout << levylab::describe_experiments();
      return 0;
    }
    auto cfg = levylab::load_config(config_path);
    if (!out_dir.empty()) cfg.output = out_dir;
    if (seed) cfg.mc.seed = *seed;
    const auto summary = levylab::run(cfg, cfg.output);
    std::cout << cfg.experiment << ": wrote";
    for (const auto& f : summary.files) std::cout << ' ' << f;
    std::cout << " to " << summary.dir.string() << " in " << summary.wall_seconds << " s\n";
    return 0;
  } catch (const levylab::NumericError& e) {
    std::cerr << "levylab: " << e.kind() << ": " << e.what() << " (reached " << e.achieved() << ")\n";
    return exit_code(e);
  } catch (const levylab::Error& e) {
    std::cerr << "levylab: " << e.kind() << ": " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "levylab: io error: " << e.what() << '\n';
    return 1;
  }
}
