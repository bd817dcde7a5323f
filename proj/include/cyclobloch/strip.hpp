#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "cyclobloch/model.hpp"

namespace cyclobloch {

struct StripError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Truncated lattice strip slanted along the spreading line
 * F_x*l + F_y*m = 0: slanted coordinates l' = l, m' = m + round(beta*l)
 * with beta = F_x/F_y, so the strip follows m = -beta*l. */
struct StripLattice {
  double beta = 0.0;
  int L_half = 0;
  int W_half = 0;

  int cols() const { return 2 * L_half + 1; }
  int rows() const { return 2 * W_half + 1; }
  long size() const { return long(cols()) * rows(); }

  long slant(int l) const;              // round(beta * l)
  long index(int lp, long mp) const;    // -1 when outside the strip
  long index_physical(int l, long m) const;
  SiteIndex physical(long idx) const;   // (l, m) of a strip index

  bool operator==(const StripLattice&) const = default;
};

StripLattice make_strip(const ModelConfig& cfg, int L_half, int W_half);

struct WavePacket {
  StripLattice strip;
  Gauge gauge = Gauge::LandauY;
  double t = 0.0;
  Eigen::VectorXcd amp;
};

/* Normalized Gaussian exp(-C_x l^2 - C_y m^2) in physical coordinates,
 * optionally with site-wise deterministic random phases keyed by
 * (seed, realization, site). */
WavePacket gaussian_packet(const StripLattice& strip, double C_x, double C_y,
                           bool incoherent, std::uint64_t seed,
                           std::uint64_t realization = 0,
                           Gauge gauge = Gauge::LandauY);

/* Probability in the outer margin band of the strip (slanted coords). */
double boundary_leak(const WavePacket& psi, double margin_fraction);

/* Diagonal gauge change between the static gauges; populations unchanged. */
WavePacket convert_gauge(const WavePacket& psi, Gauge target,
                         const ModelConfig& cfg);

/* L_half from the ballistic estimate 1.5*(A_max*t_end + width),
 * A_max = max(|v*|, Jx/sqrt(2)). */
int suggested_L_half(const ModelConfig& cfg, double t_end,
                     double initial_width);

}  // namespace cyclobloch
