// Conventions layer: derived scales, lattice maps, gauges, Stark energies.
//
// Frozen numbers below were computed independently from the defining
// formulas (double precision, numpy); they pin the conventions, not the
// implementation.

#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "cyclobloch/model.hpp"

using namespace cyclobloch;
using std::complex;

namespace {

ModelConfig make_cfg(int r, int q, double F, double alpha, double Jx = 1.0,
                     double Jy = 1.0) {
  ModelConfig cfg;
  cfg.Jx = Jx;
  cfg.Jy = Jy;
  cfg.alpha = alpha;
  cfg.F = F;
  cfg.dir = Direction::make_rational(r, q);
  return validate(cfg);
}

}  // namespace

TEST_CASE("derived scales, (1,2) F=0.3 alpha=0.1") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  const DerivedScales sc = derive_scales(cfg);
  CHECK(sc.N == 5);
  CHECK(sc.d == doctest::Approx(0.4472135954999579).epsilon(1e-15));
  CHECK(sc.d_tilde == doctest::Approx(2.23606797749979).epsilon(1e-15));
  CHECK(sc.theta == doctest::Approx(0.12566370614359174).epsilon(1e-15));
  CHECK(sc.F_cr == doctest::Approx(0.6283185307179586).epsilon(1e-15));
  CHECK(sc.v_star == doctest::Approx(0.477464829275686).epsilon(1e-15));
  CHECK(sc.Fx == doctest::Approx(0.13416407864998736).epsilon(1e-15));
  CHECK(sc.Fy == doctest::Approx(0.2683281572999747).epsilon(1e-15));
  CHECK(sc.omega_x == doctest::Approx(sc.Fx).epsilon(1e-15));
  CHECK(sc.omega_y == doctest::Approx(sc.Fy).epsilon(1e-15));
}

TEST_CASE("derived scales, irrational golden direction") {
  ModelConfig cfg;
  cfg.F = 0.5;
  cfg.alpha = 0.1;
  cfg.dir = Direction::make_irrational((std::sqrt(5.0) - 1.0) / 2.0);
  cfg = validate(cfg);
  const DerivedScales sc = derive_scales(cfg);
  const double b = (std::sqrt(5.0) - 1.0) / 2.0;
  const double rt = std::sqrt(1.0 + b * b);
  CHECK(sc.Fx == doctest::Approx(0.5 * b / rt).epsilon(1e-15));
  CHECK(sc.Fy == doctest::Approx(0.5 / rt).epsilon(1e-15));
  CHECK(sc.Fx / sc.Fy == doctest::Approx(b).epsilon(1e-14));
  CHECK(cfg.dir.beta() == doctest::Approx(b).epsilon(1e-15));
}

TEST_CASE("lattice maps round-trip exhaustively on a 100x100 block") {
  for (auto [r, q] : {std::pair{0, 1}, {1, 2}, {2, 3}}) {
    for (long l = -50; l < 50; ++l)
      for (long m = -50; m < 50; ++m) {
        const ExtendedIndex ext = to_extended({l, m}, r, q);
        CHECK(ext.s == q * l - r * m);
        CHECK(ext.p == r * l + q * m);
        CHECK(on_original_sublattice(ext, r, q));
        const auto back = from_extended(ext, r, q);
        REQUIRE(back.has_value());
        CHECK(*back == SiteIndex{l, m});
      }
  }
}

TEST_CASE("original sublattice has density 1/N on the extended lattice") {
  const int r = 1, q = 2, N = 5;
  long hits = 0;
  for (long s = 0; s < 10 * N; ++s)
    for (long p = 0; p < 10 * N; ++p) {
      const bool on = on_original_sublattice({s, p}, r, q);
      CHECK(on == from_extended({s, p}, r, q).has_value());
      if (on) ++hits;
    }
  CHECK(hits == 100 * N);
}

TEST_CASE("gauge scalars: LandauY zero, LandauX frozen value") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  CHECK(gauge_chi(Gauge::LandauY, {3, 4}, cfg) == 0.0);
  CHECK(gauge_chi(Gauge::LandauX, {3, 4}, cfg) ==
        doctest::Approx(-7.5398223686155035).epsilon(1e-15));
}

TEST_CASE("hop amplitudes: frozen LandauY x-hop") {
  const ModelConfig cfg = make_cfg(0, 1, 0.3, 0.1);
  // -(Jx/2) exp(i 2 pi alpha m) at m = 3
  const complex<double> v = hop_x(Gauge::LandauY, {5, 3}, cfg);
  CHECK(v.real() == doctest::Approx(0.15450849718747373).epsilon(1e-14));
  CHECK(v.imag() == doctest::Approx(-0.47552825814757677).epsilon(1e-14));
  // y-hops carry no phase in this gauge
  const complex<double> w = hop_y(Gauge::LandauY, {5, 3}, cfg);
  CHECK(w.real() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(w.imag() == doctest::Approx(0.0));
}

TEST_CASE("plaquette flux is 2*pi*alpha in every gauge") {
  const double alpha = 0.1;
  const ModelConfig cfg = make_cfg(1, 2, 0.7, alpha, 0.9, 1.1);
  const complex<double> expected =
      std::polar(1.0, 2.0 * std::numbers::pi * alpha);
  for (Gauge g : {Gauge::LandauX, Gauge::LandauY, Gauge::Rotated}) {
    for (long l = -3; l <= 3; l += 2)
      for (long m = -3; m <= 3; m += 3) {
        // traverse (l,m) -> (l,m+1) -> (l+1,m+1) -> (l+1,m) -> (l,m)
        const complex<double> loop =
            hop_y(g, {l, m}, cfg) * hop_x(g, {l, m + 1}, cfg) *
            std::conj(hop_y(g, {l + 1, m}, cfg)) *
            std::conj(hop_x(g, {l, m}, cfg));
        CHECK(std::abs(loop / std::abs(loop) - expected) < 1e-12);
      }
  }
}

TEST_CASE("hops transform with the site-diagonal gauge scalar") {
  const ModelConfig cfg = make_cfg(1, 2, 0.7, 0.1, 0.9, 1.1);
  for (Gauge g : {Gauge::LandauX, Gauge::Rotated}) {
    for (long l = -4; l <= 4; l += 3)
      for (long m = -4; m <= 4; m += 2) {
        const SiteIndex s{l, m};
        const complex<double> x_expect =
            gauge_phase(Gauge::LandauY, g, {l + 1, m}, cfg) *
            hop_x(Gauge::LandauY, s, cfg) *
            std::conj(gauge_phase(Gauge::LandauY, g, s, cfg));
        CHECK(std::abs(hop_x(g, s, cfg) - x_expect) < 1e-13);
        const complex<double> y_expect =
            gauge_phase(Gauge::LandauY, g, {l, m + 1}, cfg) *
            hop_y(Gauge::LandauY, s, cfg) *
            std::conj(gauge_phase(Gauge::LandauY, g, s, cfg));
        CHECK(std::abs(hop_y(g, s, cfg) - y_expect) < 1e-13);
      }
  }
}

TEST_CASE("Stark energy is F_x*l + F_y*m") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  CHECK(stark_energy({3, -2}, cfg) ==
        doctest::Approx(-0.1341640786499873).epsilon(1e-14));
  CHECK(stark_energy({0, 0}, cfg) == 0.0);
}

TEST_CASE("configuration validation rejects bad inputs") {
  CHECK_THROWS_AS(make_cfg(2, 4, 0.3, 0.1), ConfigError);   // non-coprime
  CHECK_THROWS_AS(make_cfg(3, 2, 0.3, 0.1), ConfigError);   // r > q
  CHECK_THROWS_AS(make_cfg(1, 2, 0.3, 0.6), ConfigError);   // |alpha| > 1/2
  CHECK_THROWS_AS(make_cfg(1, 2, -0.3, 0.1), ConfigError);  // F < 0
  ModelConfig bad;
  bad.dir = Direction::make_irrational(1.5);
  CHECK_THROWS_AS(validate(bad), ConfigError);
  ModelConfig golden;
  golden.dir = Direction::make_irrational(0.618);
  golden = validate(golden);
  CHECK_THROWS_AS(gauge_chi(Gauge::Rotated, {1, 1}, golden), ConfigError);
}

TEST_CASE("gauge names parse both spellings") {
  CHECK(gauge_from_string("landau_x") == Gauge::LandauX);
  CHECK(gauge_from_string("LandauX") == Gauge::LandauX);
  CHECK(gauge_from_string("landau_y") == Gauge::LandauY);
  CHECK(gauge_from_string("LandauY") == Gauge::LandauY);
  CHECK(gauge_from_string("rotated") == Gauge::Rotated);
  CHECK(gauge_from_string("Rotated") == Gauge::Rotated);
  CHECK_THROWS_AS(gauge_from_string("symmetric"), ConfigError);
  for (Gauge g : {Gauge::LandauX, Gauge::LandauY, Gauge::Rotated})
    CHECK(gauge_from_string(to_string(g)) == g);
}
