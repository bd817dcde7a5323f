#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "cyclobloch/model.hpp"

namespace cyclobloch {

struct ClassicalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ClassicalState {
  double Y = 0;
  double P = 0;
  double t = 0;
};

enum class IntegratorScheme { RK4, Symplectic2 };

struct TrajectoryRecord {
  std::vector<ClassicalState> samples;
  std::vector<double> energies;   // integral of motion at the sample times
  double max_drift = 0;           // max |I(t) - I(0)|
  double drift_per_time = 0;
  bool step_too_large = false;    // diagnostic: drift > 1e-6 per unit time
};

/* Autonomous effective Hamiltonian
 *   H = -Jy cos P - Jx cos Y + calF_y Y + calF_x P,  calF = F_{x,y}/(2 pi alpha). */
double h_autonomous(const ClassicalState& s, const ModelConfig& cfg);

/* Driven torus flow: dY/dt = J'y sin(P - w_y t), dP/dt = -J'x sin(Y + w_x t),
 * J' = 2 pi alpha J, w = F_{x,y}. */
std::pair<double, double> rhs_driven(double t, const ClassicalState& s,
                                     const ModelConfig& cfg);

/* Exactly conserved along rhs_driven: I = H_cl(t) + w_y Y + w_x P.  (The
 * w coefficients, not F/(2 pi alpha): direct differentiation of the driven
 * flow fixes them in this time normalization.) */
double integral_of_motion(double t, const ClassicalState& s,
                          const ModelConfig& cfg);

TrajectoryRecord integrate(const ClassicalState& s0, double t_end, double dt,
                           const ModelConfig& cfg,
                           IntegratorScheme scheme = IntegratorScheme::RK4,
                           long record_every = 1);

/* Common driving period 2 pi q / w_y = 2 pi sqrt(N) / F (rational only). */
double common_period(const ModelConfig& cfg);

/* Stroboscopic samples (Y, P) at t = j*T, j = 0..n_periods-1, wrapped to
 * [-pi, pi).  Rational directions only. */
std::vector<std::pair<double, double>> stroboscopic_map(
    const ClassicalState& s0, int n_periods, const ModelConfig& cfg,
    IntegratorScheme scheme = IntegratorScheme::RK4);

/* Poincare section at T_y = 2 pi / w_y, the labeled alternative offered for
 * irrational directions (no strict common period exists there). */
std::vector<std::pair<double, double>> poincare_map_ty(
    const ClassicalState& s0, int n_samples, const ModelConfig& cfg,
    IntegratorScheme scheme = IntegratorScheme::RK4);

/* Fraction of seeds whose drift-corrected stroboscopic orbit stays inside a
 * 2 pi window in both coordinates (transporting-island membership). */
double island_scan(const ModelConfig& cfg,
                   const std::vector<std::pair<double, double>>& seeds,
                   int n_periods);

/* n seeds evenly spaced on the P = 0 axis. */
std::vector<std::pair<double, double>> default_portrait_seeds(int n = 20);

double wrap_pi(double x);

}  // namespace cyclobloch
