#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cyclobloch/io.hpp"
#include "cyclobloch/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "cyclobloch: spectra, transporting states and wave-packet dynamics of "
      "a charged particle on a square lattice in crossed fields"};

  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;

  app.add_option("subcommand", subcommand,
                 "spectrum | phase-portrait | transport-state | evolve | "
                 "scan-A | perturb | classify")
      ->required();
  app.add_option("--config", config_path, "key=value configuration file")
      ->required();
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--threads", threads,
                 "worker threads (default: CYCLOBLOCH_THREADS or 1)");
  app.add_option_function<std::uint64_t>(
         "--seed",
         [&](const std::uint64_t& v) {
           seed = v;
           have_seed = true;
         },
         "RNG stream seed (overrides the built-in default)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads <= 0) {
      const char* env = std::getenv("CYCLOBLOCH_THREADS");
      threads = env ? std::max(1, std::atoi(env)) : 1;
    }
    cyclobloch::ExperimentSpec spec = cyclobloch::parse_config(
        cyclobloch::read_text(config_path), subcommand);
    if (have_seed) spec.seed = seed;
    cyclobloch::run(spec, out_dir, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
