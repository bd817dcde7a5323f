#include "cyclobloch/model.hpp"

#include <cmath>
#include <numbers>

namespace cyclobloch {

namespace {
constexpr double TWO_PI = 2.0 * std::numbers::pi;
}

long gcd_long(long a, long b) {
  a = std::labs(a);
  b = std::labs(b);
  while (b != 0) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Gauge gauge_from_string(const std::string& name) {
  if (name == "landau_x" || name == "LandauX") return Gauge::LandauX;
  if (name == "landau_y" || name == "LandauY") return Gauge::LandauY;
  if (name == "rotated" || name == "Rotated") return Gauge::Rotated;
  throw ConfigError("UnknownGauge: '" + name + "'");
}

std::string to_string(Gauge g) {
  switch (g) {
    case Gauge::LandauX: return "landau_x";
    case Gauge::LandauY: return "landau_y";
    case Gauge::Rotated: return "rotated";
  }
  return "?";
}

double Direction::beta() const {
  if (rational) return static_cast<double>(r) / static_cast<double>(q);
  return beta_irrational;
}

ModelConfig validate(ModelConfig cfg) {
  if (!(cfg.Jx >= 0.0) || !(cfg.Jy >= 0.0))
    throw ConfigError("NegativeCoupling: Jx, Jy must be >= 0");
  if (!(std::abs(cfg.alpha) <= 0.5))
    throw ConfigError("AlphaOutOfRange: |alpha| must be <= 1/2");
  if (!(cfg.F >= 0.0)) throw ConfigError("NegativeField: F must be >= 0");
  if (cfg.dir.rational) {
    if (cfg.dir.q <= 0) throw ConfigError("BadDirection: q must be positive");
    if (cfg.dir.r < 0 || cfg.dir.r > cfg.dir.q)
      throw ConfigError("BadDirection: need 0 <= r <= q");
    if (gcd_long(cfg.dir.r, cfg.dir.q) != 1)
      throw ConfigError("NonCoprime: gcd(r,q) must be 1");
  } else {
    double b = cfg.dir.beta_irrational;
    if (!(b > 0.0 && b < 1.0))
      throw ConfigError("BadDirection: irrational beta must lie in (0,1)");
  }
  return cfg;
}

DerivedScales derive_scales(const ModelConfig& cfg) {
  DerivedScales s;
  if (cfg.dir.rational) {
    const double r = cfg.dir.r, q = cfg.dir.q;
    s.N = cfg.dir.r * cfg.dir.r + cfg.dir.q * cfg.dir.q;
    const double rt = std::sqrt(static_cast<double>(s.N));
    s.Fx = cfg.F * r / rt;
    s.Fy = cfg.F * q / rt;
    s.d = 1.0 / rt;
    s.d_tilde = rt;
    s.theta = TWO_PI * cfg.alpha / s.N;
  } else {
    const double b = cfg.dir.beta_irrational;
    const double rt = std::sqrt(1.0 + b * b);
    s.Fx = cfg.F * b / rt;
    s.Fy = cfg.F / rt;
    s.N = 0;
    s.d = 0.0;
    s.d_tilde = 0.0;
    s.theta = 0.0;
  }
  s.omega_x = s.Fx;
  s.omega_y = s.Fy;
  s.F_cr = TWO_PI * std::abs(cfg.alpha) * std::max(cfg.Jx, cfg.Jy);
  s.v_star = cfg.alpha != 0.0 ? cfg.F / (TWO_PI * cfg.alpha) : 0.0;
  if (cfg.alpha != 0.0) {
    s.calF_x = s.Fx / (TWO_PI * cfg.alpha);
    s.calF_y = s.Fy / (TWO_PI * cfg.alpha);
  }
  return s;
}

ExtendedIndex to_extended(SiteIndex site, int r, int q) {
  return ExtendedIndex{q * site.l - r * site.m, r * site.l + q * site.m};
}

bool on_original_sublattice(ExtendedIndex ext, int r, int q) {
  const long N = static_cast<long>(r) * r + static_cast<long>(q) * q;
  long rem = (q * ext.s + r * ext.p) % N;
  return rem == 0;
}

std::optional<SiteIndex> from_extended(ExtendedIndex ext, int r, int q) {
  const long N = static_cast<long>(r) * r + static_cast<long>(q) * q;
  const long num_l = q * ext.s + r * ext.p;
  if (num_l % N != 0) return std::nullopt;
  const long num_m = q * ext.p - r * ext.s;
  return SiteIndex{num_l / N, num_m / N};
}

double gauge_chi(Gauge g, SiteIndex site, const ModelConfig& cfg) {
  const double l = static_cast<double>(site.l);
  const double m = static_cast<double>(site.m);
  switch (g) {
    case Gauge::LandauY:
      return 0.0;
    case Gauge::LandauX:
      return -TWO_PI * cfg.alpha * l * m;
    case Gauge::Rotated: {
      if (!cfg.dir.rational)
        throw ConfigError("BadDirection: rotated gauge needs rational (r,q)");
      const double r = cfg.dir.r, q = cfg.dir.q;
      const double N = r * r + q * q;
      // chi solving chi(l+1,m)-chi(l,m) = theta*r*(q*l-r*m),
      //             chi(l,m+1)-chi(l,m) = -theta*r*(r*l+q*m).
      return std::numbers::pi * cfg.alpha * r / N *
             (q * l * l - 2.0 * r * l * m - q * m * m - q * l + q * m);
    }
  }
  return 0.0;
}

std::complex<double> gauge_phase(Gauge from, Gauge to, SiteIndex site,
                                 const ModelConfig& cfg) {
  const double dchi = gauge_chi(to, site, cfg) - gauge_chi(from, site, cfg);
  return std::polar(1.0, dchi);
}

std::complex<double> hop_x(Gauge g, SiteIndex source, const ModelConfig& cfg) {
  const double amp = -0.5 * cfg.Jx;
  switch (g) {
    case Gauge::LandauY:
      return amp * std::polar(1.0, TWO_PI * cfg.alpha * source.m);
    case Gauge::LandauX:
      return std::complex<double>(amp, 0.0);
    case Gauge::Rotated: {
      if (!cfg.dir.rational)
        throw ConfigError("BadDirection: rotated gauge needs rational (r,q)");
      const DerivedScales s = derive_scales(cfg);
      const double p = cfg.dir.r * source.l + cfg.dir.q * source.m;
      return amp * std::polar(1.0, s.theta * cfg.dir.q * p);
    }
  }
  return {};
}

std::complex<double> hop_y(Gauge g, SiteIndex source, const ModelConfig& cfg) {
  const double amp = -0.5 * cfg.Jy;
  switch (g) {
    case Gauge::LandauY:
      return std::complex<double>(amp, 0.0);
    case Gauge::LandauX:
      return amp * std::polar(1.0, -TWO_PI * cfg.alpha * source.l);
    case Gauge::Rotated: {
      if (!cfg.dir.rational)
        throw ConfigError("BadDirection: rotated gauge needs rational (r,q)");
      const DerivedScales s = derive_scales(cfg);
      const double p = cfg.dir.r * source.l + cfg.dir.q * source.m;
      return amp * std::polar(1.0, -s.theta * cfg.dir.r * p);
    }
  }
  return {};
}

double stark_energy(SiteIndex site, const ModelConfig& cfg) {
  const DerivedScales s = derive_scales(cfg);
  return s.Fx * site.l + s.Fy * site.m;
}

}  // namespace cyclobloch
