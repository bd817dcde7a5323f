// Diabatic line continuation and transporting-state assembly.

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cyclobloch/fiber.hpp"
#include "cyclobloch/model.hpp"
#include "cyclobloch/strip.hpp"
#include "cyclobloch/transport.hpp"

using namespace cyclobloch;

namespace {

ModelConfig make_cfg(int r, int q, double F, double alpha) {
  ModelConfig cfg;
  cfg.alpha = alpha;
  cfg.F = F;
  cfg.dir = Direction::make_rational(r, q);
  return validate(cfg);
}

// Seed the transporting line the way the runner does: detect it on a
// coarse one-zone spectrum, then map the detected vector onto a raw
// fiber band index by overlap.
DiabaticLine line01(double F, int points, double zones) {
  const ModelConfig cfg = make_cfg(0, 1, F, 0.1);
  const DerivedScales sc = derive_scales(cfg);
  const long p_half = 90;  // generous: Wannier tails span ~J/(d F) rungs
  SpectrumOptions opt;
  opt.p_min = -p_half;
  opt.p_max = p_half;
  opt.keep_vectors = true;
  const double half_zone = std::numbers::pi / sc.d_tilde;
  const SpectrumResult coarse = band_structure(
      cfg, uniform_kappa_grid(-half_zone, half_zone, 65), opt);
  const DiabaticLine probe = auto_follow(coarse, cfg);
  const std::size_t j_mid = probe.kappa_samples.size() / 2;
  const double kappa_seed = probe.kappa_samples[j_mid];
  const FiberSolution sol = solve_fiber(
      build_fiber_rotated_frame(kappa_seed, cfg, -p_half, p_half), true);
  const Eigen::VectorXcd ov =
      sol.vectors.adjoint() * probe.vectors.col(Eigen::Index(j_mid));
  int band = 0;
  double best = -1.0;
  for (Eigen::Index j = 0; j < ov.size(); ++j)
    if (std::abs(ov[j]) > best) {
      best = std::abs(ov[j]);
      band = int(j);
    }
  const double half = zones * std::numbers::pi / sc.d;
  return follow_line_scan(cfg, uniform_kappa_grid(-half, half, points),
                          kappa_seed, band, -p_half, p_half);
}

}  // namespace

TEST_CASE("(0,1) diabatic line is straight with slope v*") {
  const double F = 0.1;
  const ModelConfig cfg = make_cfg(0, 1, F, 0.1);
  const DerivedScales sc = derive_scales(cfg);
  const DiabaticLine line = line01(F, 256, 1.0);
  REQUIRE(line.kappa_samples.size() == 256);
  CHECK(line.min_overlap > 0.99);
  CHECK(line.slope == doctest::Approx(sc.v_star).epsilon(2e-3));
  // residual from the best straight line stays far below the band scale
  const std::size_t n = line.kappa_samples.size();
  double sk = 0, se = 0, skk = 0, ske = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sk += line.kappa_samples[i];
    se += line.energies[i];
    skk += line.kappa_samples[i] * line.kappa_samples[i];
    ske += line.kappa_samples[i] * line.energies[i];
  }
  const double denom = double(n) * skk - sk * sk;
  const double slope = (double(n) * ske - sk * se) / denom;
  const double icept = (se - slope * sk) / double(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(line.energies[i] - slope *
                                     line.kappa_samples[i] - icept));
  CHECK(worst < 1e-3);
}

TEST_CASE("line continuation is stable under grid doubling") {
  const DiabaticLine a = line01(0.1, 128, 1.0);
  const DiabaticLine b = line01(0.1, 256, 1.0);
  const Eigen::VectorXcd va = a.vectors.col(a.vectors.cols() - 1);
  const Eigen::VectorXcd vb = b.vectors.col(b.vectors.cols() - 1);
  REQUIRE(va.size() == vb.size());
  CHECK(std::abs(va.dot(vb)) > 0.999);
  CHECK(std::abs(a.energies.back() - b.energies.back()) < 1e-6);
}

TEST_CASE("envelope weights are normalized, centered, and monotone") {
  const ModelConfig cfg = make_cfg(0, 1, 0.1, 0.1);
  const DiabaticLine line = line01(0.1, 101, 1.0);
  for (double C : {0.2, 1.0, 5.0}) {
    const std::vector<double> w = envelope_weights(line, C, cfg);
    REQUIRE(w.size() == 101);
    const std::size_t peak = 50;  // kappa grid is symmetric about 0
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      CHECK(w[i] > 0.0);
      if (i < peak) CHECK(w[i + 1] >= w[i] * (1.0 - 1e-12));
      if (i >= peak) CHECK(w[i + 1] <= w[i] * (1.0 + 1e-12));
    }
  }
  const GaussianEnvelope env = gaussian_envelope(2.0, 0.3, 0.5);
  CHECK(env(0.3) == 1.0);
  CHECK(env(0.3 + 2.0 * std::numbers::pi / 0.5) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("assembly span: one zone for C >= 1/2, extended below") {
  const ModelConfig cfg = make_cfg(0, 1, 0.1, 0.1);
  const double zone = 2.0 * std::numbers::pi;  // d = 1 for (0,1)
  CHECK(assembly_kappa_span(0.5, cfg) == doctest::Approx(zone));
  CHECK(assembly_kappa_span(3.0, cfg) == doctest::Approx(zone));
  CHECK(assembly_kappa_span(0.1, cfg) > zone);
}

TEST_CASE("assembled transporting state is normalized and convertible") {
  const ModelConfig cfg = make_cfg(0, 1, 0.1, 0.1);
  const DiabaticLine line = line01(0.1, 128, 1.0);
  const TransportingState state = assemble(line, 1.0, cfg);
  CHECK(state.amp.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state.C == 1.0);
  const WavePacket psi = to_gauge(state, Gauge::LandauY, cfg);
  CHECK(psi.amp.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(psi.gauge == Gauge::LandauY);

  // embedding into a larger strip preserves everything
  const StripLattice big = make_strip(cfg, psi.strip.L_half + 8,
                                      psi.strip.W_half + 8);
  const WavePacket emb = embed_packet(psi, big);
  CHECK(emb.amp.norm() == doctest::Approx(psi.amp.norm()).epsilon(1e-12));
  StripLattice tiny = make_strip(cfg, 2, 2);
  CHECK_THROWS_AS(embed_packet(psi, tiny), TransportError);
}

TEST_CASE("auto continuation finds the transporting line") {
  const ModelConfig cfg = make_cfg(0, 1, 0.1, 0.1);
  const DerivedScales sc = derive_scales(cfg);
  SpectrumOptions opt;
  opt.p_min = -90;
  opt.p_max = 90;
  opt.keep_vectors = true;
  const std::vector<double> grid = uniform_kappa_grid(
      -std::numbers::pi / sc.d, std::numbers::pi / sc.d, 65);
  const SpectrumResult spec = band_structure(cfg, grid, opt);
  const DiabaticLine line = auto_follow(spec, cfg);
  CHECK(line.slope == doctest::Approx(sc.v_star).epsilon(0.2));
  CHECK(line.kappa_samples.size() == 65);
}
