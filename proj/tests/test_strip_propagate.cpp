// Strip geometry, packet construction, and the two propagation schemes.
//
// The free-lattice closed form psi_{l,m}(t) = i^(l+m) J_l(Jx t) J_m(Jy t)
// (alpha = 0, F = 0, delta start) is an exact oracle; Bessel reference
// values are frozen from an independent special-function library.

#include "doctest.h"

#include <cmath>
#include <complex>

#include "cyclobloch/model.hpp"
#include "cyclobloch/propagate.hpp"
#include "cyclobloch/strip.hpp"

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

TEST_CASE("strip geometry and index round-trips") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  const StripLattice strip = make_strip(cfg, 6, 4);
  CHECK(strip.cols() == 13);
  CHECK(strip.rows() == 9);
  CHECK(strip.size() == 117);
  CHECK(strip.slant(3) == 2);   // round(0.5 * 3), half away from zero
  CHECK(strip.slant(-3) == -2);
  for (long i = 0; i < strip.size(); ++i) {
    const SiteIndex s = strip.physical(i);
    CHECK(strip.index_physical(s.l, s.m) == i);
  }
  CHECK(strip.index(99, 0) == -1);
}

TEST_CASE("gaussian packets are normalized and seed-deterministic") {
  const ModelConfig cfg = make_cfg(0, 1, 0.3, 0.1);
  const StripLattice strip = make_strip(cfg, 14, 14);
  const WavePacket a = gaussian_packet(strip, 0.05, 0.05, true, 42, 0);
  const WavePacket b = gaussian_packet(strip, 0.05, 0.05, true, 42, 0);
  const WavePacket c = gaussian_packet(strip, 0.05, 0.05, true, 42, 1);
  CHECK(a.amp.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((a.amp - b.amp).norm() == 0.0);       // bitwise reproducible
  CHECK((a.amp - c.amp).norm() > 1e-3);       // realizations differ
  const WavePacket coh = gaussian_packet(strip, 1.0, 1.0, false, 42);
  CHECK(boundary_leak(coh, 0.05) < 1e-12);
}

TEST_CASE("free-lattice evolution matches i^(l+m) J_l(Jx t) J_m(Jy t)") {
  const double Jx = 0.8, Jy = 1.3, t = 4.0;
  const ModelConfig cfg = make_cfg(0, 1, 0.0, 0.0, Jx, Jy);
  const StripLattice strip = make_strip(cfg, 20, 20);
  WavePacket psi0;
  psi0.strip = strip;
  psi0.amp = Eigen::VectorXcd::Zero(strip.size());
  psi0.amp[strip.index_physical(0, 0)] = 1.0;

  const EvolveResult res = evolve_static_gauge(psi0, t, 1.0, cfg);
  const std::vector<double> jx = bessel_j_array(Jx * t, 20);
  const std::vector<double> jy = bessel_j_array(Jy * t, 20);
  const complex<double> I(0.0, 1.0);
  double worst = 0.0;
  for (long i = 0; i < strip.size(); ++i) {
    const SiteIndex s = strip.physical(i);
    const double jl = jx[std::size_t(std::abs(s.l))] *
                      ((s.l < 0 && (s.l % 2)) ? -1.0 : 1.0);
    const double jm = jy[std::size_t(std::abs(s.m))] *
                      ((s.m < 0 && (s.m % 2)) ? -1.0 : 1.0);
    const complex<double> expect = std::pow(I, double(s.l + s.m)) * jl * jm;
    worst = std::max(worst, std::abs(res.final_state.amp[i] - expect));
  }
  CHECK(worst < 1e-8);

  // the td-gauge stepper reproduces the same state
  const EvolveResult res2 = evolve_td_gauge(psi0, t, 0.01, cfg);
  CHECK((res2.final_state.amp - res.final_state.amp).cwiseAbs().maxCoeff() <
        1e-7);
}

TEST_CASE("Bessel coefficients against frozen references") {
  const double expected[7] = {0.3979848594461096,    0.5777652315290233,
                              0.2817389423527413,    0.08514992694801524,
                              0.01879021158143015,   0.003274598141067865,
                              0.00047213042485139134};
  const std::vector<double> j = bessel_j_array(1.7, 6);
  REQUIRE(j.size() == 7);
  for (int n = 0; n <= 6; ++n)
    CHECK(j[std::size_t(n)] == doctest::Approx(expected[n]).epsilon(1e-12));
  const std::vector<double> j5 = bessel_j_array(5.0, 15);
  CHECK(j5[3] == doctest::Approx(0.364831230613667).epsilon(1e-12));
  CHECK(j5[15] == doctest::Approx(4.796743277517961e-7).epsilon(1e-9));
  const std::vector<double> j0 = bessel_j_array(0.0, 4);
  CHECK(j0[0] == 1.0);
  CHECK(j0[1] == 0.0);
}

TEST_CASE("the two schemes agree after gauge conversion") {
  const ModelConfig cfg = make_cfg(1, 2, 0.5, 0.1);
  const StripLattice strip = make_strip(cfg, 10, 10);
  const WavePacket psi0 = gaussian_packet(strip, 0.3, 0.3, false, 7);
  const EvolveResult a = evolve_td_gauge(psi0, 3.0, 0.01, cfg);
  const EvolveResult b = evolve_static_gauge(psi0, 3.0, 0.5, cfg);
  REQUIRE(a.final_state.gauge == b.final_state.gauge);
  const complex<double> ov =
      a.final_state.amp.dot(b.final_state.amp);  // conjugate dot
  CHECK(std::abs(ov) > 1.0 - 1e-8);
  CHECK(a.max_norm_drift <= 1e-9 * 3.0);
  CHECK(b.max_norm_drift <= 1e-12 * 6.0);  // per slice, 6 slices
  // site populations agree much tighter than the acceptance bound
  CHECK((a.final_state.amp.cwiseAbs2() - b.final_state.amp.cwiseAbs2())
            .cwiseAbs()
            .maxCoeff() < 1e-8);
}

TEST_CASE("td stepper rejects oversized steps") {
  const ModelConfig cfg = make_cfg(1, 2, 0.5, 0.1);
  const StripLattice strip = make_strip(cfg, 6, 6);
  const WavePacket psi0 = gaussian_packet(strip, 0.3, 0.3, false, 7);
  CHECK_THROWS_AS(evolve_td_gauge(psi0, 1.0, 0.5, cfg), PropagatorError);
}

TEST_CASE("gauge conversion is unitary and invertible") {
  const ModelConfig cfg = make_cfg(1, 2, 0.5, 0.1);
  const StripLattice strip = make_strip(cfg, 8, 8);
  const WavePacket psi = gaussian_packet(strip, 0.2, 0.2, true, 11);
  for (Gauge g : {Gauge::LandauX, Gauge::Rotated}) {
    const WavePacket conv = convert_gauge(psi, g, cfg);
    CHECK(conv.amp.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((conv.amp.cwiseAbs2() - psi.amp.cwiseAbs2()).cwiseAbs().maxCoeff() <
          1e-14);
    const WavePacket back = convert_gauge(conv, Gauge::LandauY, cfg);
    CHECK((back.amp - psi.amp).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("ensemble runs are deterministic for a fixed seed") {
  const ModelConfig cfg = make_cfg(0, 1, 0.5, 0.1);
  const StripLattice strip = make_strip(cfg, 14, 14);
  const EnsembleResult a = ensemble_evolve(strip, 0.3, 0.3, 3, 99,
                                           EvolveScheme::StaticGauge, 2.0,
                                           1.0, cfg);
  const EnsembleResult b = ensemble_evolve(strip, 0.3, 0.3, 3, 99,
                                           EvolveScheme::StaticGauge, 2.0,
                                           1.0, cfg);
  CHECK(a.n_realizations == 3);
  REQUIRE(a.mean.size() == b.mean.size());
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    CHECK(a.mean.m2_eta[i] == b.mean.m2_eta[i]);
    CHECK(a.mean.x_mean[i] == b.mean.x_mean[i]);
  }
  CHECK(a.max_leak < 1e-10);
}
