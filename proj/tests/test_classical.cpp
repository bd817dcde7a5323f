// Classical driven torus flow: conservation, convergence, maps.

#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cyclobloch/classical.hpp"
#include "cyclobloch/model.hpp"

using namespace cyclobloch;

namespace {

ModelConfig make_cfg(int r, int q, double F, double alpha) {
  ModelConfig cfg;
  cfg.alpha = alpha;
  cfg.F = F;
  cfg.dir = Direction::make_rational(r, q);
  return validate(cfg);
}

}  // namespace

TEST_CASE("integral of motion is conserved along the driven flow") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  const ClassicalState s0{0.8, -0.45, 0.0};
  const TrajectoryRecord rec =
      integrate(s0, 100.0, 1e-3, cfg, IntegratorScheme::RK4, 100);
  CHECK(rec.max_drift <= 1e-8);
  CHECK_FALSE(rec.step_too_large);
  REQUIRE(rec.samples.size() > 10);
  REQUIRE(rec.energies.size() == rec.samples.size());
}

TEST_CASE("RK4 drift shrinks by ~16x when the step halves") {
  const ModelConfig cfg = make_cfg(1, 2, 0.5, 0.1);
  const ClassicalState s0{1.2, 0.3, 0.0};
  const double d1 =
      integrate(s0, 10.0, 4e-2, cfg, IntegratorScheme::RK4, 10).max_drift;
  const double d2 =
      integrate(s0, 10.0, 2e-2, cfg, IntegratorScheme::RK4, 10).max_drift;
  CHECK(d1 / d2 > 8.0);
  CHECK(d1 / d2 < 40.0);
}

TEST_CASE("symplectic scheme integrates with bounded drift") {
  const ModelConfig cfg = make_cfg(1, 2, 0.5, 0.1);
  const TrajectoryRecord rec = integrate(
      {0.5, 0.1, 0.0}, 50.0, 1e-3, cfg, IntegratorScheme::Symplectic2, 100);
  CHECK(rec.max_drift < 1e-2);
  CHECK(std::isfinite(rec.drift_per_time));
}

TEST_CASE("oversized steps are flagged") {
  const ModelConfig cfg = make_cfg(1, 2, 0.5, 0.1);
  const TrajectoryRecord rec =
      integrate({1.0, 1.0, 0.0}, 50.0, 0.8, cfg, IntegratorScheme::RK4, 10);
  CHECK(rec.step_too_large);
}

TEST_CASE("common period equals 2*pi*sqrt(N)/F") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  CHECK(common_period(cfg) ==
        doctest::Approx(2.0 * std::numbers::pi * std::sqrt(5.0) / 0.3)
            .epsilon(1e-12));
  ModelConfig golden;
  golden.F = 0.3;
  golden.dir = Direction::make_irrational(0.618);
  CHECK_THROWS_AS(common_period(validate(golden)), ClassicalError);
}

TEST_CASE("stroboscopic map samples one point per period, wrapped") {
  const ModelConfig cfg = make_cfg(0, 1, 0.3, 0.1);
  const auto pts = stroboscopic_map({0.1, 0.0, 0.0}, 12, cfg);
  CHECK(pts.size() == 12);
  for (const auto& [Y, P] : pts) {
    CHECK(Y >= -std::numbers::pi);
    CHECK(Y < std::numbers::pi + 1e-12);
    CHECK(P >= -std::numbers::pi);
    CHECK(P < std::numbers::pi + 1e-12);
  }
}

TEST_CASE("poincare section works for irrational directions") {
  ModelConfig golden;
  golden.F = 0.5;
  golden.alpha = 0.1;
  golden.dir = Direction::make_irrational((std::sqrt(5.0) - 1.0) / 2.0);
  golden = validate(golden);
  const auto pts = poincare_map_ty({0.3, -0.2, 0.0}, 8, golden);
  CHECK(pts.size() == 8);
}

TEST_CASE("island scan returns a fraction in [0,1]") {
  const ModelConfig cfg = make_cfg(0, 1, 0.3, 0.1);
  const double frac = island_scan(cfg, default_portrait_seeds(8), 40);
  CHECK(frac >= 0.0);
  CHECK(frac <= 1.0);
}

TEST_CASE("wrap_pi maps onto [-pi, pi)") {
  CHECK(wrap_pi(0.0) == 0.0);
  CHECK(wrap_pi(2.0 * std::numbers::pi) == doctest::Approx(0.0));
  CHECK(wrap_pi(std::numbers::pi + 0.1) ==
        doctest::Approx(-std::numbers::pi + 0.1).epsilon(1e-12));
  CHECK(wrap_pi(-3.5 * std::numbers::pi) ==
        doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-12));
}
