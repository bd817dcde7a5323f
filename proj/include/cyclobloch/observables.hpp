#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cyclobloch/model.hpp"
#include "cyclobloch/strip.hpp"

namespace cyclobloch {

struct ObservablesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* First and second moments of a packet, both in lattice coordinates and
 * in the rotated frame eta = (q*x - r*y)/sqrt(N) (spreading direction),
 * xi = (r*x + q*y)/sqrt(N) (field direction).  Irrational directions use
 * the unit vectors built from beta. */
struct Moments {
  double x_mean = 0.0;
  double y_mean = 0.0;
  double M2 = 0.0;          // sum (l^2 + m^2) |psi|^2
  double sigma = 0.0;       // sqrt(M2 - x_mean^2 - y_mean^2)
  double eta_mean = 0.0;
  double xi_mean = 0.0;
  double m2_eta = 0.0;      // variance along eta
  double m2_xi = 0.0;       // variance along xi
};

Moments moments(const WavePacket& psi, const ModelConfig& cfg);

/* Unit vector (ux, uy) of the eta axis; the xi axis is (-uy, ux)
 * rotated, i.e. xi direction = (uy_field...) -- returned as a pair
 * ((eta_x, eta_y), (xi_x, xi_y)). */
std::pair<std::pair<double, double>, std::pair<double, double>>
frame_axes(const ModelConfig& cfg);

struct ObservableSeries {
  std::vector<double> times;
  std::vector<double> x_mean;
  std::vector<double> y_mean;
  std::vector<double> sigma;
  std::vector<double> m2_eta;
  std::vector<double> m2_xi;
  std::vector<double> eta_mean;
  std::vector<double> xi_mean;
  std::vector<double> leak;
  std::vector<double> norm;

  std::size_t size() const { return times.size(); }
  void append(double t, const Moments& mom, double leak_value,
              double norm_value);
};

/* Distribution of |psi|^2 over eta bins of the given width (default: the
 * fine spacing d = 1/sqrt(N)); probabilities sum to the packet norm. */
struct EtaProfile {
  std::vector<double> centers;
  std::vector<double> prob;
  double bin_width = 1.0;
};

EtaProfile project_eta(const WavePacket& psi, const ModelConfig& cfg,
                       double bin_width = 0.0);

struct FitResult {
  double coefficient = 0.0;  // slope (ballistic) or prefactor (scaling)
  double exponent = 0.0;     // power-law exponent for scaling fits
  double intercept = 0.0;
  double residual = 0.0;     // relative rms misfit
  double window_lo = 0.0;
  double window_hi = 0.0;
  long n = 0;
};

/* Least-squares slope of sqrt(m2_eta) versus t over [t_lo, t_hi]. */
FitResult ballistic_fit(const ObservableSeries& series, double t_lo,
                        double t_hi);

/* Log-log fit A = coefficient * F^exponent. */
FitResult scaling_fit(const std::vector<std::pair<double, double>>& A_of_F);

/* First time sqrt(m2_eta) exceeds twice its initial value (+inf if never). */
double transient_estimate(const ObservableSeries& series);

/* Fit window starting past max(transient, 10% of horizon) and ending
 * before the boundary leak exceeds leak_tol. */
std::pair<double, double> default_fit_window(const ObservableSeries& series,
                                             double leak_tol = 1e-10);

enum class Regime { Transporting, Ballistic, Localized, Oscillating, Ambiguous };

std::string to_string(Regime r);

struct Classification {
  Regime regime = Regime::Ambiguous;
  /* Diagnostics; each condition is met when its score >= 1. */
  double score_transporting = 0.0;  // center displacement / (0.9 |v*| t)
  double score_ballistic = 0.0;     // (0.10 - fit residual)/0.10, clamped
  double score_localized = 0.0;     // 3 * initial width / max width
  double score_oscillating = 0.0;   // spectral peak-to-median ratio / 5
};

Classification classify_regime(const ObservableSeries& series,
                               const ModelConfig& cfg);

/* Single-frequency least-squares fit x(t) ~ offset + A sin(omega t + phase)
 * with omega scanned over [omega_lo, omega_hi]. */
struct OscillationFit {
  double omega = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double r2 = 0.0;
};

OscillationFit fit_oscillation(const std::vector<double>& times,
                               const std::vector<double>& values,
                               double omega_lo, double omega_hi);

}  // namespace cyclobloch
