#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclobloch/model.hpp"

namespace cyclobloch {

struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Subcommand {
  Spectrum,
  PhasePortrait,
  TransportState,
  Evolve,
  ScanA,
  Perturb,
  Classify
};

Subcommand subcommand_from_string(const std::string& name);
std::string to_string(Subcommand s);

struct RunParams {
  // spectral
  int kappa_points = 256;
  double kappa_lo = 0.0;   // kappa_lo == kappa_hi requests one zone
  double kappa_hi = 0.0;
  long window = 40;        // rung half-window of the fiber truncation
  double kappa0 = 0.0;     // line seed
  int band = -1;           // -1 = automatic line detection
  // dynamics
  double t_end = 100.0;
  double dt = 0.0;         // 0 = automatic; slice length for scheme=static
  double record_dt = 0.5;
  int seeds = 12;          // ensemble realizations / portrait trajectories
  double C = 1.0;          // transporting-state envelope parameter
  double Cx = 0.02;        // Gaussian packet widths
  double Cy = 0.1;
  int strip_L = 0;         // 0 = automatic
  int strip_W = 63;
  std::string scheme = "static";   // "static" | "td"
  std::string init = "gaussian";   // "gaussian" | "random-gaussian" |
                                   // "transport" | "file"
  std::string init_state;          // packet file for init=file
  // scans
  std::vector<double> F_grid;
  // classical
  int periods = 200;
  // perturbative
  long nu = 0;
};

struct ExperimentSpec {
  Subcommand subcommand = Subcommand::Spectrum;
  ModelConfig config;
  RunParams params;
  std::uint64_t seed = 12345;
};

/* key=value lines; '#' comments; unknown keys are hard errors
 * (UnknownKey), malformed values TypeError, and each subcommand checks
 * its requirements (MissingRequired). */
ExperimentSpec parse_config(const std::string& text,
                            const std::string& subcommand);

/* Execute the experiment, writing deterministic CSV outputs under
 * out_dir.  Throws on any flagged invariant violation. */
void run(const ExperimentSpec& spec, const std::string& out_dir, int threads);

}  // namespace cyclobloch
