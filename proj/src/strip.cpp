#include "cyclobloch/strip.hpp"

#include <cmath>
#include <complex>

#include "cyclobloch/rng.hpp"

namespace cyclobloch {

long StripLattice::slant(int l) const { return std::lround(beta * l); }

long StripLattice::index(int lp, long mp) const {
  if (lp < -L_half || lp > L_half) return -1;
  if (mp < -W_half || mp > W_half) return -1;
  return long(lp + L_half) * rows() + (mp + W_half);
}

long StripLattice::index_physical(int l, long m) const {
  return index(l, m + slant(l));
}

SiteIndex StripLattice::physical(long idx) const {
  const int lp = int(idx / rows()) - L_half;
  const long mp = idx % rows() - W_half;
  return SiteIndex{lp, mp - slant(lp)};
}

StripLattice make_strip(const ModelConfig& cfg, int L_half, int W_half) {
  if (L_half < 1 || W_half < 1)
    throw StripError("BadExtent: strip half-extents must be >= 1");
  const DerivedScales sc = derive_scales(cfg);
  double beta = 0.0;
  if (sc.Fy != 0.0)
    beta = sc.Fx / sc.Fy;
  else if (sc.Fx != 0.0)
    throw StripError("BadExtent: strip slope undefined for F_y = 0");
  StripLattice s;
  s.beta = beta;
  s.L_half = L_half;
  s.W_half = W_half;
  return s;
}

WavePacket gaussian_packet(const StripLattice& strip, double C_x, double C_y,
                           bool incoherent, std::uint64_t seed,
                           std::uint64_t realization, Gauge gauge) {
  if (!(C_x > 0.0) || !(C_y > 0.0))
    throw StripError("BadExtent: Gaussian widths must be positive");
  WavePacket psi;
  psi.strip = strip;
  psi.gauge = gauge;
  psi.amp = Eigen::VectorXcd::Zero(strip.size());
  for (long i = 0; i < strip.size(); ++i) {
    const SiteIndex site = strip.physical(i);
    const double w =
        std::exp(-C_x * double(site.l) * site.l - C_y * double(site.m) * site.m);
    if (w < 1e-300) continue;
    if (incoherent) {
      const std::uint64_t key =
          (std::uint64_t(std::uint32_t(site.l)) << 32) | std::uint32_t(site.m);
      psi.amp[i] = std::polar(w, uniform_phase(seed, realization, key));
    } else {
      psi.amp[i] = w;
    }
  }
  const double norm = psi.amp.norm();
  if (!(norm > 0.0)) throw StripError("BadExtent: packet has zero mass on strip");
  psi.amp /= norm;
  return psi;
}

double boundary_leak(const WavePacket& psi, double margin_fraction) {
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5))
    throw StripError("BadMargin: margin_fraction must lie in (0, 0.5)");
  const StripLattice& s = psi.strip;
  const int lt = int(std::floor(s.L_half * (1.0 - margin_fraction)));
  const int mt = int(std::floor(s.W_half * (1.0 - margin_fraction)));
  double leak = 0.0;
  for (long i = 0; i < s.size(); ++i) {
    const int lp = int(i / s.rows()) - s.L_half;
    const long mp = i % s.rows() - s.W_half;
    if (std::abs(lp) > lt || std::labs(mp) > mt) leak += std::norm(psi.amp[i]);
  }
  return leak;
}

WavePacket convert_gauge(const WavePacket& psi, Gauge target,
                         const ModelConfig& cfg) {
  WavePacket out = psi;
  if (target == psi.gauge) return out;
  for (long i = 0; i < psi.strip.size(); ++i) {
    if (psi.amp[i] == std::complex<double>(0.0, 0.0)) continue;
    const SiteIndex site = psi.strip.physical(i);
    const double dchi =
        gauge_chi(target, site, cfg) - gauge_chi(psi.gauge, site, cfg);
    out.amp[i] = psi.amp[i] * std::polar(1.0, dchi);
  }
  out.gauge = target;
  return out;
}

int suggested_L_half(const ModelConfig& cfg, double t_end, double initial_width) {
  const DerivedScales sc = derive_scales(cfg);
  const double a_max = std::max(std::abs(sc.v_star), cfg.Jx / std::sqrt(2.0));
  const double need = 1.5 * (a_max * t_end + initial_width);
  return std::max(8, int(std::ceil(need)));
}

}  // namespace cyclobloch
