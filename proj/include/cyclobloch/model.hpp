#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace cyclobloch {

/* Units: e = a = hbar = 1 throughout, so h = 2*pi and the Bloch
 * frequencies are omega_x = F_x, omega_y = F_y. */

enum class Gauge { LandauX, LandauY, Rotated };

Gauge gauge_from_string(const std::string& name);
std::string to_string(Gauge g);

/* Field direction: rational (r,q) coprime with 0 <= r <= q, or an
 * irrational slope beta = F_x/F_y in (0,1). Exactly one is active. */
struct Direction {
  bool rational = true;
  int r = 0;
  int q = 1;
  double beta_irrational = 0.0;

  static Direction make_rational(int r, int q) {
    Direction dir;
    dir.rational = true;
    dir.r = r;
    dir.q = q;
    return dir;
  }
  static Direction make_irrational(double beta) {
    Direction dir;
    dir.rational = false;
    dir.beta_irrational = beta;
    return dir;
  }

  double beta() const;      // F_x / F_y
};

struct ModelConfig {
  double Jx = 1.0;
  double Jy = 1.0;
  double alpha = 0.1;       // flux per plaquette in units of the flux quantum
  double F = 0.0;           // field magnitude
  Direction dir;
  Gauge gauge = Gauge::LandauY;
};

struct DerivedScales {
  double Fx = 0.0;
  double Fy = 0.0;
  double omega_x = 0.0;     // = Fx
  double omega_y = 0.0;     // = Fy
  int N = 1;                // r^2 + q^2 (rational directions only)
  double d = 1.0;           // fine spacing 1/sqrt(N)
  double d_tilde = 1.0;     // coarse period sqrt(N)
  double theta = 0.0;       // 2*pi*alpha/N
  double F_cr = 0.0;        // 2*pi*alpha*max(Jx,Jy)
  double v_star = 0.0;      // drift speed F/(2*pi*alpha)
  double calF_x = 0.0;      // Fx/(2*pi*alpha)
  double calF_y = 0.0;      // Fy/(2*pi*alpha)
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/* Checks couplings, |alpha| <= 1/2, F >= 0 and direction sanity.
 * Rational directions are normalized to 0 <= r <= q, gcd(r,q) = 1
 * (throws ConfigError("NonCoprime...") etc. otherwise). */
ModelConfig validate(ModelConfig cfg);

DerivedScales derive_scales(const ModelConfig& cfg);

/* Original lattice site (x,y) = (l,m) and its image on the extended
 * (rotated) lattice, (s,p) = (q*l - r*m, r*l + q*m). */
struct SiteIndex {
  long l = 0;
  long m = 0;
  bool operator==(const SiteIndex&) const = default;
};

struct ExtendedIndex {
  long s = 0;
  long p = 0;
  bool operator==(const ExtendedIndex&) const = default;
};

ExtendedIndex to_extended(SiteIndex site, int r, int q);

/* Inverse map; a point of the extended lattice lies on the original
 * sublattice iff q*s + r*p == 0 (mod N), in which case
 * (l,m) = ((q*s + r*p)/N, (q*p - r*s)/N). */
std::optional<SiteIndex> from_extended(ExtendedIndex ext, int r, int q);

bool on_original_sublattice(ExtendedIndex ext, int r, int q);

/* Site-diagonal gauge transforms.  chi(g) is defined so that a state in
 * gauge g reads psi_g = exp(i*chi_g) * psi_LandauY.  All three gauges
 * carry flux +2*pi*alpha per plaquette; the LandauY -> LandauX factor is
 * exp(-i*2*pi*alpha*l*m). */
double gauge_chi(Gauge g, SiteIndex site, const ModelConfig& cfg);

std::complex<double> gauge_phase(Gauge from, Gauge to, SiteIndex site,
                                 const ModelConfig& cfg);

/* Hopping amplitudes <target|H|source> of the static Hamiltonian in a
 * given gauge (target = source + x_hat resp. + y_hat); the Stark term
 * Fx*l + Fy*m is gauge-independent. */
std::complex<double> hop_x(Gauge g, SiteIndex source, const ModelConfig& cfg);
std::complex<double> hop_y(Gauge g, SiteIndex source, const ModelConfig& cfg);
double stark_energy(SiteIndex site, const ModelConfig& cfg);

long gcd_long(long a, long b);

}  // namespace cyclobloch
