#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

#include "cyclobloch/model.hpp"

namespace cyclobloch {

enum class FiberBoundary { OpenTruncated, PeriodicFiber };

struct FiberError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* One kappa-fiber of the 2D problem: a Hermitian operator over Stark
 * rungs p with couplings at offsets +r and +q (lower triangle implied).
 *
 * OpenTruncated fibers (rotated frame, and every (0,1) fiber) store the
 * banded form: diagonal[i] at rung p_min+i, coupling_r[i] = H(i, i+r),
 * coupling_q[i] = H(i, i+q).  For r = 0 the Jx pair is folded into the
 * diagonal, -Jx*cos(theta*q*p - q*d*kappa).
 *
 * PeriodicFiber operators (rotated basis, r >= 1) are assembled densely:
 * r coupled rings of size K*q, vertical wrap carrying exp(i*k). */
struct FiberOperator {
  int size = 0;
  double kappa = 0.0;   // frame quasimomentum; for basis fibers the raw k
  int r = 0;
  int q = 1;
  FiberBoundary boundary = FiberBoundary::OpenTruncated;
  long p_min = 0;

  Eigen::VectorXd diagonal;
  Eigen::VectorXcd coupling_r;   // empty when r == 0
  Eigen::VectorXcd coupling_q;
  Eigen::MatrixXcd dense_matrix; // PeriodicFiber only

  Eigen::MatrixXcd dense() const;

  /* Total upper-triangle entry H(i, i+offset); sums both coupling
   * families when r == q == 1. */
  std::complex<double> upper_entry(int i, int offset) const;
};

FiberOperator build_fiber_rotated_frame(double kappa, const ModelConfig& cfg,
                                        long p_min, long p_max);

FiberOperator build_fiber_rotated_basis(double k, const ModelConfig& cfg,
                                        int K);

struct FiberSolution {
  Eigen::VectorXd energies;      // ascending
  Eigen::MatrixXcd vectors;      // columns, only if requested
};

FiberSolution solve_fiber(const FiberOperator& op, bool want_vectors);

struct EnergyWindow {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct SpectrumOptions {
  long p_min = -40;
  long p_max = 40;
  std::optional<EnergyWindow> energy_window;
  bool keep_vectors = false;
  /* Bulk retention: drop eigenpairs with more than edge_mass_tol
   * probability on the outer edge_fraction of rungs (each side). */
  double edge_mass_tol = 1e-10;
  double edge_fraction = 0.10;
  /* Adaptive grid refinement near close energy pairs (0 disables). */
  double refine_gap = 0.0;
  int refine_rounds = 2;
};

struct SpectrumResult {
  std::vector<double> kappa_grid;
  std::vector<std::vector<double>> energies;   // ragged, ascending per kappa
  std::vector<Eigen::MatrixXcd> vectors;       // per kappa, if kept
  long p_min = 0;
  long p_max = 0;
};

SpectrumResult band_structure(const ModelConfig& cfg,
                              std::vector<double> kappa_grid,
                              const SpectrumOptions& opt);

std::vector<double> uniform_kappa_grid(double kappa_lo, double kappa_hi,
                                       int points);

/* Dense Hamiltonian of the open square patch l,m in [-L_half, L_half] x
 * [-M_half, M_half] in the given gauge (for gauge-invariance checks). */
Eigen::MatrixXcd dense_patch_hamiltonian(const ModelConfig& cfg, Gauge g,
                                         int L_half, int M_half);

struct CrossValidateOptions {
  std::vector<double> k_values = {0.0, 1.0, 2.2};
  int K = 0;               // 0 = choose automatically
  int margin_rungs = 40;   // truncation buffer on each side
  int window_rungs = 8;    // half-width of the compared central window
};

/* Maximum discrepancy between rotated-frame and rotated-basis spectra on
 * matched quasimomenta (k = d_tilde * kappa), both restricted to a
 * truncation-converged central energy window. */
double cross_validate_methods(const ModelConfig& cfg,
                              const CrossValidateOptions& opt);

}  // namespace cyclobloch
