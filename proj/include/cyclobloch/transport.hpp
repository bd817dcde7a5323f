#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "cyclobloch/fiber.hpp"
#include "cyclobloch/model.hpp"
#include "cyclobloch/strip.hpp"

namespace cyclobloch {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* A near-straight spectral line E(kappa) followed diabatically through
 * avoided crossings, with parallel-transport phase fixing of the fiber
 * eigenvectors. */
struct DiabaticLine {
  std::vector<double> kappa_samples;
  std::vector<double> energies;
  Eigen::MatrixXcd vectors;   // column j = fiber vector at kappa_samples[j]
  long p_min = 0;             // rung window of the vectors
  long p_max = 0;
  double slope = 0.0;         // fitted dE/dkappa
  double min_overlap = 1.0;   // smallest successive overlap along the line
  double seed_kappa = 0.0;
  int seed_band = 0;
};

/* Follow from (kappa0, band_index) by maximum modulus of the successive
 * overlap, not by energy order.  Throws LineLost when the best overlap
 * drops below 0.5 and MissingVectors when the spectrum kept none. */
DiabaticLine follow_line(const SpectrumResult& spectrum,
                         std::pair<double, int> seed);

/* Same continuation rule, building each fiber on the fly over the given
 * grid (memory-lean variant for wide kappa ranges). */
DiabaticLine follow_line_scan(const ModelConfig& cfg,
                              const std::vector<double>& kappa_grid,
                              double kappa0, int band_index, long p_min,
                              long p_max);

/* Near-straight line with fitted slope within 20% of v*, tried from a
 * few seed columns around the middle of the grid (a midpoint landing on
 * a symmetric crossing only sees degenerate mixtures); candidates are
 * ranked by their weakest continuation overlap.  Throws LineLost when
 * none qualifies. */
DiabaticLine auto_follow(const SpectrumResult& spectrum,
                         const ModelConfig& cfg);

/* Envelope g(kappa) = exp[-C (d (kappa-kappa_c) / 2 pi)^2]. */
struct GaussianEnvelope {
  double C = 1.0;
  double kappa_center = 0.0;
  double d = 1.0;

  double operator()(double kappa) const;
};

GaussianEnvelope gaussian_envelope(double C, double kappa_center, double d);

/* Normalized envelope weights on the line's samples. */
std::vector<double> envelope_weights(const DiabaticLine& line, double C,
                                     const ModelConfig& cfg);

/* Width of the kappa range the assembly integral needs: one zone of
 * width 2 pi / d for C >= 0.5, extended to cover four standard
 * deviations of the envelope for smaller C. */
double assembly_kappa_span(double C, const ModelConfig& cfg);

struct TransportingState {
  std::vector<SiteIndex> sites;
  Eigen::VectorXcd amp;
  double C = 1.0;
  Gauge gauge = Gauge::Rotated;  // construction gauge
  double slope = 0.0;
  double kappa_center = 0.0;
};

struct AssembleOptions {
  long l_half = 64;  // transverse support kept around the origin
};

/* Trapezoidal quadrature of the envelope-weighted line over its samples,
 * restricted to the physical sublattice and normalized. */
TransportingState assemble(const DiabaticLine& line, double C,
                           const ModelConfig& cfg,
                           const AssembleOptions& opts = {});

/* Gauge conversion onto a strip that covers the state's support; pure
 * site-diagonal phases, populations unchanged. */
WavePacket to_gauge(const TransportingState& state, Gauge target,
                    const ModelConfig& cfg);
WavePacket to_gauge(const TransportingState& state, Gauge target,
                    const ModelConfig& cfg, const StripLattice& strip);

/* Copy onto a (larger) strip; throws MassLost when more than 1e-9 of the
 * probability falls outside it. */
WavePacket embed_packet(const WavePacket& psi, const StripLattice& strip);

}  // namespace cyclobloch
