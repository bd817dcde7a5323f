#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cyclobloch/model.hpp"
#include "cyclobloch/observables.hpp"
#include "cyclobloch/strip.hpp"

namespace cyclobloch {

struct PropagatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvolveOptions {
  double record_dt = 0.5;              // sampling interval (td scheme)
  std::vector<double> snapshot_times;  // extra full-state snapshots
  double margin_fraction = 0.05;       // boundary-leak band
  bool keep_final = true;
};

/* Snapshots and the final state are reported in the LandauY gauge at
 * their recorded time regardless of the stepping scheme. */
struct EvolveResult {
  ObservableSeries series;
  std::vector<WavePacket> snapshots;
  WavePacket final_state;
  double max_norm_drift = 0.0;
  double dt_used = 0.0;
  long n_steps = 0;
};

/* RK4 integration in the time-dependent gauge (no Stark diagonal;
 * oscillating hop phases at the Bloch frequencies).
 * Requires dt <= 0.05 / max(omega_x, omega_y, Jx, Jy); throws
 * StepTooLarge otherwise and NormDrift when |norm-1| exceeds
 * 1e-9 * max(t,1). */
EvolveResult evolve_td_gauge(const WavePacket& psi0, double t_end, double dt,
                             const ModelConfig& cfg,
                             const EvolveOptions& opts = {});

/* Chebyshev expansion of exp(-iH tau) per slice in the static LandauY
 * gauge, spectral bounds from the Gershgorin estimate inflated by 5%.
 * Observables are sampled at slice boundaries.  Throws BoundsTooTight
 * when the expansion cannot reach `tol`, NormDrift as above. */
EvolveResult evolve_static_gauge(const WavePacket& psi0, double t_end,
                                 double slice_dt, const ModelConfig& cfg,
                                 double tol = 1e-14,
                                 const EvolveOptions& opts = {});

enum class EvolveScheme { TdGauge, StaticGauge };

/* Incoherent ensemble: random-phase Gaussian packets keyed by
 * (seed, realization); site probabilities and moment series averaged in
 * realization order (scheduler-independent). */
struct EnsembleResult {
  ObservableSeries mean;
  EtaProfile final_profile;
  int n_realizations = 0;
  double max_norm_drift = 0.0;
  double max_leak = 0.0;
};

EnsembleResult ensemble_evolve(const StripLattice& strip, double C_x,
                               double C_y, int n_realizations,
                               std::uint64_t seed, EvolveScheme scheme,
                               double t_end, double step,
                               const ModelConfig& cfg, double tol = 1e-14,
                               const EvolveOptions& opts = {});

/* J_0..J_n at argument x >= 0 by downward recurrence (coefficients of the
 * Chebyshev propagator). */
std::vector<double> bessel_j_array(double x, int n_max);

}  // namespace cyclobloch
