#include <omp.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "acg/accept.hpp"
#include "acg/config.hpp"
#include "acg/errors.hpp"
#include "acg/harness.hpp"

namespace {

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int workers = 0;
};

acg::ScenarioConfig resolve(const GlobalOpts& g) {
  std::optional<std::filesystem::path> out;
  if (g.out_dir) out = *g.out_dir;
  return acg::load_scenario(g.config_path, g.seed, out);
}

int exit_code_for(const std::string& category) {
  if (category == "config") return 2;
  if (category == "numerics") return 3;
  if (category == "io") return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rough atom-guide simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--config", g.config_path, "scenario config file");
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--workers", g.workers, "worker threads (results are invariant)");
  app.add_option("--out", g.out_dir, "output directory");

  auto* roughness = app.add_subcommand("roughness", "generate rough-field realizations");
  auto* profile = app.add_subcommand("profile", "longitudinal potential profile + fits");
  auto* cmo = app.add_subcommand("cmo", "centre-of-mass damping study");
  auto* lifetime = app.add_subcommand("lifetime", "trapped-fraction lifetime scan");
  auto* stability = app.add_subcommand("stability", "parametric stability scan");
  auto* accept = app.add_subcommand("accept", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  if (g.workers > 0) omp_set_num_threads(g.workers);

  try {
    if (accept->parsed()) {
      std::uint64_t seed = g.seed.value_or(1);
      bool ok = acg::run_acceptance(seed, std::cout);
      std::cout << (ok ? "acceptance: all criteria passed"
                       : "acceptance: FAILURES present")
                << "\n";
      return ok ? 0 : 1;
    }
    acg::ScenarioConfig sc = resolve(g);
    if (roughness->parsed()) acg::cmd_roughness(sc);
    if (profile->parsed()) acg::cmd_profile(sc);
    if (cmo->parsed()) acg::cmd_cmo(sc);
    if (lifetime->parsed()) acg::cmd_lifetime(sc);
    if (stability->parsed()) acg::cmd_stability(sc);
  } catch (const acg::Error& e) {
    std::cerr << "error-category: " << e.category() << "\n"
              << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error-category: internal\nerror: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
