// Fiber operators and spectra.
//
// The frozen eigenvalues were produced by an independent dense
// diagonalization of the defining matrices (numpy.linalg.eigvalsh).

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cyclobloch/fiber.hpp"
#include "cyclobloch/model.hpp"

using namespace cyclobloch;

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

double nearest(double E, const Eigen::VectorXd& set) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < set.size(); ++i)
    best = std::min(best, std::abs(E - set[i]));
  return best;
}

}  // namespace

TEST_CASE("(0,1) fiber equals the frozen Stark-Harper chain spectrum") {
  // alpha=0.1, F=0.3, kappa=0.7, rungs -20..20; ascending indices 17..23.
  const double expected[7] = {
      -0.883926615054668,   -0.6023304517331598, -0.2935183817590081,
      -0.03139231176394129, 0.22963049317834253, 0.5828111674825962,
      0.685510623228954};
  const ModelConfig cfg = make_cfg(0, 1, 0.3, 0.1);
  FiberOperator op = build_fiber_rotated_frame(0.7, cfg, -20, 20);
  FiberSolution sol = solve_fiber(op, false);
  REQUIRE(sol.energies.size() == 41);
  for (int i = 0; i < 7; ++i)
    CHECK(sol.energies[17 + i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("(0,1) fiber with Jy=0 collapses onto its diagonal") {
  const ModelConfig cfg = make_cfg(0, 1, 0.3, 0.1, 1.0, 0.0);
  const double kappa = 1.3;
  FiberOperator op = build_fiber_rotated_frame(kappa, cfg, -10, 10);
  FiberSolution sol = solve_fiber(op, false);
  std::vector<double> diag;
  for (long p = -10; p <= 10; ++p)
    diag.push_back(0.3 * double(p) -
                   std::cos(2.0 * std::numbers::pi * 0.1 * double(p) - kappa));
  std::sort(diag.begin(), diag.end());
  REQUIRE(sol.energies.size() == long(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i)
    CHECK(sol.energies[long(i)] == doctest::Approx(diag[i]).epsilon(1e-12));
}

TEST_CASE("dense patch spectrum matches an independent construction") {
  // (1,2), alpha=1/3, F=0.7, Jx=0.9, Jy=1.1, open 7x7 patch, LandauY.
  const double expected[6] = {-3.4521238332341415, -3.1024507858321826,
                              -2.8063727201069053, -2.5091648505554494,
                              -2.312468648229541,  -2.1845550381702563};
  const ModelConfig cfg = make_cfg(1, 2, 0.7, 1.0 / 3.0, 0.9, 1.1);
  const Eigen::MatrixXcd H = dense_patch_hamiltonian(cfg, Gauge::LandauY, 3, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H,
                                                     Eigen::EigenvaluesOnly);
  REQUIRE(es.info() == Eigen::Success);
  for (int i = 0; i < 6; ++i)
    CHECK(es.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("patch spectra agree across all three gauges") {
  const ModelConfig cfg = make_cfg(1, 2, 0.7, 0.1, 0.9, 1.1);
  Eigen::VectorXd ref;
  for (Gauge g : {Gauge::LandauY, Gauge::LandauX, Gauge::Rotated}) {
    const Eigen::MatrixXcd H = dense_patch_hamiltonian(cfg, g, 3, 3);
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H,
                                                       Eigen::EigenvaluesOnly);
    REQUIRE(es.info() == Eigen::Success);
    if (ref.size() == 0)
      ref = es.eigenvalues();
    else
      CHECK((es.eigenvalues() - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fiber operators are Hermitian with accurate eigenpairs") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  FiberOperator op = build_fiber_rotated_frame(0.55, cfg, -25, 25);
  const Eigen::MatrixXcd H = op.dense();
  CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  FiberSolution sol = solve_fiber(op, true);
  for (Eigen::Index j = 0; j < sol.energies.size(); ++j) {
    const double resid =
        (H * sol.vectors.col(j) - sol.energies[j] * sol.vectors.col(j))
            .norm();
    CHECK(resid <= 1e-10);
  }
}

TEST_CASE("central eigenvalues are stable under window doubling") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  FiberSolution small =
      solve_fiber(build_fiber_rotated_frame(0.55, cfg, -40, 40), false);
  FiberSolution big =
      solve_fiber(build_fiber_rotated_frame(0.55, cfg, -80, 80), false);
  for (Eigen::Index j = 0; j < small.energies.size(); ++j) {
    const double E = small.energies[j];
    if (std::abs(E) > 1.5) continue;  // compare the bulk only
    CHECK(nearest(E, big.energies) < 1e-10);
  }
}

TEST_CASE("spectrum is periodic in kappa with period 2*pi*d") {
  const ModelConfig cfg = make_cfg(1, 2, 0.3, 0.1);
  const DerivedScales sc = derive_scales(cfg);
  FiberSolution a =
      solve_fiber(build_fiber_rotated_frame(0.55, cfg, -40, 40), false);
  FiberSolution b = solve_fiber(
      build_fiber_rotated_frame(0.55 + 2.0 * std::numbers::pi * sc.d, cfg,
                                -40, 40),
      false);
  for (Eigen::Index j = 0; j < a.energies.size(); ++j) {
    const double E = a.energies[j];
    if (std::abs(E) > 1.5) continue;
    CHECK(nearest(E, b.energies) < 1e-10);
  }
}

TEST_CASE("frame and periodized constructions cross-validate") {
  const ModelConfig cfg = make_cfg(1, 2, 1.0, 0.1);
  CHECK(cross_validate_methods(cfg, CrossValidateOptions{}) <= 1e-8);
}

TEST_CASE("band structure grids and bookkeeping") {
  const ModelConfig cfg = make_cfg(1, 1, 1.0, 0.1);
  CHECK_THROWS_AS(uniform_kappa_grid(0.0, 1.0, 1), FiberError);
  const std::vector<double> grid = uniform_kappa_grid(-1.0, 1.0, 5);
  CHECK(grid.front() == doctest::Approx(-1.0));
  CHECK(grid.back() == doctest::Approx(1.0));
  SpectrumOptions opt;
  opt.p_min = -20;
  opt.p_max = 20;
  opt.keep_vectors = true;
  SpectrumResult res = band_structure(cfg, grid, opt);
  REQUIRE(res.kappa_grid.size() == 5);
  REQUIRE(res.energies.size() == 5);
  REQUIRE(res.vectors.size() == 5);
  for (std::size_t i = 0; i < res.energies.size(); ++i) {
    CHECK(std::is_sorted(res.energies[i].begin(), res.energies[i].end()));
    CHECK(res.vectors[i].cols() == long(res.energies[i].size()));
  }
}

TEST_CASE("periodized construction rejects odd supercell factors") {
  const ModelConfig cfg = make_cfg(1, 2, 1.0, 0.1);
  CHECK_THROWS_AS(build_fiber_rotated_basis(0.0, cfg, 7), FiberError);
  CHECK_THROWS_AS(build_fiber_rotated_basis(0.0, cfg, 0), FiberError);
}
