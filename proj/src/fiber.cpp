#include "cyclobloch/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>

namespace cyclobloch {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

/* Jx coupling of rung p to rung p+r at quasimomentum kappa (r > 0). */
std::complex<double> phi_coupling(long p, const ModelConfig& cfg,
                                  const DerivedScales& sc, double kappa) {
  return -0.5 * cfg.Jx *
         std::exp(I * (-sc.theta * cfg.dir.q * double(p) +
                       cfg.dir.q * sc.d * kappa));
}

/* Jy coupling of rung p to rung p+q at quasimomentum kappa. */
std::complex<double> theta_coupling(long p, const ModelConfig& cfg,
                                    const DerivedScales& sc, double kappa) {
  return -0.5 * cfg.Jy *
         std::exp(I * (sc.theta * cfg.dir.r * double(p) -
                       cfg.dir.r * sc.d * kappa));
}

void require_rational(const ModelConfig& cfg, const char* where) {
  if (!cfg.dir.rational) {
    std::ostringstream os;
    os << "IrrationalDirection: " << where
       << " needs a rational field direction (r, q)";
    throw FiberError(os.str());
  }
}

}  // namespace

Eigen::MatrixXcd FiberOperator::dense() const {
  if (boundary == FiberBoundary::PeriodicFiber) return dense_matrix;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(size, size);
  for (int i = 0; i < size; ++i) H(i, i) = diagonal[i];
  if (r > 0) {
    for (int i = 0; i + r < size; ++i) {
      H(i, i + r) += coupling_r[i];
      H(i + r, i) += std::conj(coupling_r[i]);
    }
  }
  for (int i = 0; i + q < size; ++i) {
    H(i, i + q) += coupling_q[i];
    H(i + q, i) += std::conj(coupling_q[i]);
  }
  return H;
}

std::complex<double> FiberOperator::upper_entry(int i, int offset) const {
  if (boundary == FiberBoundary::PeriodicFiber)
    return dense_matrix(i, i + offset);
  std::complex<double> v{0.0, 0.0};
  if (r > 0 && offset == r && i + r < size) v += coupling_r[i];
  if (offset == q && i + q < size) v += coupling_q[i];
  return v;
}

FiberOperator build_fiber_rotated_frame(double kappa, const ModelConfig& cfg,
                                        long p_min, long p_max) {
  validate(cfg);
  require_rational(cfg, "build_fiber_rotated_frame");
  const DerivedScales sc = derive_scales(cfg);
  const int r = cfg.dir.r, q = cfg.dir.q;
  const long M = p_max - p_min + 1;
  if (M < 2L * q + 1L) {
    std::ostringstream os;
    os << "WindowTooSmall: rung window [" << p_min << ", " << p_max
       << "] has " << M << " rungs, need at least " << 2 * q + 1;
    throw FiberError(os.str());
  }

  FiberOperator op;
  op.size = int(M);
  op.kappa = kappa;
  op.r = r;
  op.q = q;
  op.boundary = FiberBoundary::OpenTruncated;
  op.p_min = p_min;
  op.diagonal.resize(M);
  op.coupling_q.resize(M);
  op.coupling_q.setZero();
  if (r > 0) {
    op.coupling_r.resize(M);
    op.coupling_r.setZero();
  }

  for (long i = 0; i < M; ++i) {
    const long p = p_min + i;
    double diag = sc.d * cfg.F * double(p);
    if (r == 0) {
      // Jx pair collapses onto the diagonal of the (0,1) chain.
      diag += -cfg.Jx * std::cos(sc.theta * q * double(p) - q * sc.d * kappa);
    } else if (i + r < M) {
      op.coupling_r[i] = phi_coupling(p, cfg, sc, kappa);
    }
    op.diagonal[i] = diag;
    if (i + q < M) op.coupling_q[i] = theta_coupling(p, cfg, sc, kappa);
  }
  return op;
}

FiberOperator build_fiber_rotated_basis(double k, const ModelConfig& cfg,
                                        int K) {
  if (cfg.dir.rational && cfg.dir.r > cfg.dir.q)
    throw FiberError("UnsupportedR: periodized construction needs r <= q");
  validate(cfg);
  require_rational(cfg, "build_fiber_rotated_basis");
  if (K <= 0 || K % 2 != 0) {
    std::ostringstream os;
    os << "OddK: supercell factor K must be a positive even integer, got "
       << K;
    throw FiberError(os.str());
  }
  const DerivedScales sc = derive_scales(cfg);
  const int r = cfg.dir.r, q = cfg.dir.q;

  if (r == 0) {
    // Single line per unit cell: the periodized construction degenerates;
    // serve the open chain at kappa = k (d_tilde = 1 here).  Rungs start at
    // zero so the on-site cosine agrees with an open-frame build over the
    // same absolute rung range.
    return build_fiber_rotated_frame(k, cfg, 0, (long)K);
  }

  const int ring = K * q;          // sites along one line
  const int n = ring * r;          // r coupled lines
  const auto idx = [ring](int p, int mu) { return mu * ring + p; };

  FiberOperator op;
  op.size = n;
  op.kappa = k;
  op.r = r;
  op.q = q;
  op.boundary = FiberBoundary::PeriodicFiber;
  op.diagonal.resize(n);
  op.dense_matrix = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd& H = op.dense_matrix;

  const double gamma = 2.0 * M_PI * cfg.alpha / double(sc.N);
  for (int mu = 0; mu < r; ++mu) {
    for (int p = 0; p < ring; ++p) {
      const double w = double(r) * p + double(q) * mu;   // Stark rung
      const int j = idx(p, mu);
      const double diag = cfg.F / sc.d_tilde * w;
      op.diagonal[j] = diag;
      H(j, j) = diag;

      // along the line: p -> p+1 (ring-periodic, no k phase)
      {
        const int jt = idx((p + 1) % ring, mu);
        const std::complex<double> v =
            -0.5 * cfg.Jx * std::exp(I * (gamma * q * w));
        H(jt, j) += v;
        H(j, jt) += std::conj(v);
      }
      // across lines: mu -> mu+1, with the supercell phase on the wrap
      {
        std::complex<double> v =
            -0.5 * cfg.Jy * std::exp(-I * (gamma * r * w));
        int jt;
        if (mu + 1 < r) {
          jt = idx(p, mu + 1);
        } else {
          jt = idx((p + q) % ring, 0);
          v *= std::exp(I * k);
        }
        H(jt, j) += v;
        H(j, jt) += std::conj(v);
      }
    }
  }
  return op;
}

FiberSolution solve_fiber(const FiberOperator& op, bool want_vectors) {
  Eigen::MatrixXcd H = op.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      H, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw FiberError("ConvergenceFailure: dense Hermitian eigensolve failed");
  FiberSolution sol;
  sol.energies = es.eigenvalues();
  if (want_vectors) sol.vectors = es.eigenvectors();
  return sol;
}

std::vector<double> uniform_kappa_grid(double kappa_lo, double kappa_hi,
                                       int points) {
  if (points < 2) throw FiberError("GridMismatch: need at least 2 points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = kappa_lo + (kappa_hi - kappa_lo) * double(i) / double(points - 1);
  return g;
}

namespace {

/* Probability carried by the outer rung margins of an open fiber. */
double edge_mass(const Eigen::VectorXcd& v, int edge) {
  const int n = int(v.size());
  double m = 0.0;
  for (int i = 0; i < edge; ++i) m += std::norm(v[i]);
  for (int i = n - edge; i < n; ++i) m += std::norm(v[i]);
  return m;
}

}  // namespace

SpectrumResult band_structure(const ModelConfig& cfg,
                              std::vector<double> kappa_grid,
                              const SpectrumOptions& opt) {
  if (kappa_grid.empty())
    throw FiberError("GridMismatch: empty kappa grid");
  std::sort(kappa_grid.begin(), kappa_grid.end());

  SpectrumResult out;
  out.p_min = opt.p_min;
  out.p_max = opt.p_max;

  const long M = opt.p_max - opt.p_min + 1;
  const int edge = std::max(1, int(std::ceil(opt.edge_fraction * double(M))));

  const auto solve_one = [&](double kappa, std::vector<double>& ener,
                             Eigen::MatrixXcd* vecs) {
    FiberOperator op =
        build_fiber_rotated_frame(kappa, cfg, opt.p_min, opt.p_max);
    FiberSolution sol = solve_fiber(op, true);
    std::vector<int> keep;
    for (int j = 0; j < sol.energies.size(); ++j) {
      const double E = sol.energies[j];
      if (opt.energy_window &&
          (E < opt.energy_window->lo || E > opt.energy_window->hi))
        continue;
      if (edge_mass(sol.vectors.col(j), edge) > opt.edge_mass_tol) continue;
      keep.push_back(j);
    }
    ener.resize(keep.size());
    if (vecs) vecs->resize(M, long(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) {
      ener[j] = sol.energies[keep[j]];
      if (vecs) vecs->col(long(j)) = sol.vectors.col(keep[j]);
    }
  };

  std::set<double> grid(kappa_grid.begin(), kappa_grid.end());
  for (int round = 0;; ++round) {
    out.kappa_grid.assign(grid.begin(), grid.end());
    out.energies.assign(out.kappa_grid.size(), {});
    out.vectors.clear();
    if (opt.keep_vectors) out.vectors.resize(out.kappa_grid.size());
    for (size_t i = 0; i < out.kappa_grid.size(); ++i)
      solve_one(out.kappa_grid[i], out.energies[i],
                opt.keep_vectors ? &out.vectors[i] : nullptr);

    if (opt.refine_gap <= 0.0 || round >= opt.refine_rounds) break;
    // Insert midpoints around kappa points carrying near-degeneracies.
    std::set<double> next(grid);
    for (size_t i = 0; i + 1 < out.kappa_grid.size(); ++i) {
      bool close = false;
      for (size_t s = i; s <= i + 1 && !close; ++s)
        for (size_t j = 0; j + 1 < out.energies[s].size(); ++j)
          if (out.energies[s][j + 1] - out.energies[s][j] < opt.refine_gap) {
            close = true;
            break;
          }
      if (close)
        next.insert(0.5 * (out.kappa_grid[i] + out.kappa_grid[i + 1]));
    }
    if (next.size() == grid.size()) break;
    grid.swap(next);
  }
  return out;
}

Eigen::MatrixXcd dense_patch_hamiltonian(const ModelConfig& cfg, Gauge g,
                                         int L_half, int M_half) {
  validate(cfg);
  const DerivedScales sc = derive_scales(cfg);
  const int Lx = 2 * L_half + 1, Ly = 2 * M_half + 1;
  const int n = Lx * Ly;
  const auto idx = [&](int l, int m) {
    return (l + L_half) * Ly + (m + M_half);
  };
  (void)sc;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (int l = -L_half; l <= L_half; ++l)
    for (int m = -M_half; m <= M_half; ++m) {
      const int j = idx(l, m);
      H(j, j) = stark_energy({l, m}, cfg);
      if (l + 1 <= L_half) {
        const std::complex<double> v = hop_x(g, {l, m}, cfg);
        H(idx(l + 1, m), j) += v;
        H(j, idx(l + 1, m)) += std::conj(v);
      }
      if (m + 1 <= M_half) {
        const std::complex<double> v = hop_y(g, {l, m}, cfg);
        H(idx(l, m + 1), j) += v;
        H(j, idx(l, m + 1)) += std::conj(v);
      }
    }
  return H;
}

double cross_validate_methods(const ModelConfig& cfg,
                              const CrossValidateOptions& opt) {
  validate(cfg);
  require_rational(cfg, "cross_validate_methods");
  const DerivedScales sc = derive_scales(cfg);
  const int r = cfg.dir.r, q = cfg.dir.q;
  const double edF = sc.d * cfg.F;
  if (edF <= 0.0)
    throw FiberError("GridMismatch: cross-validation needs F > 0");

  // Wannier-Stark states on the rung ladder decay super-exponentially,
  // |psi(n hops)| ~ J_n(2t / (dw * edF)); size the buffer between the
  // compared window and the boundaries so that the discarded tail mass is
  // below the matching tolerance.
  const auto rungs_needed = [edF](double hop, long dw) -> long {
    const double x = std::max(2.0 * hop / (double(dw) * edF), 1e-30);
    const double target = -13.0 * std::log(10.0);
    long n = 1;
    while (n < 4000 &&
           2.0 * (double(n) * std::log(x / 2.0) - std::lgamma(double(n) + 1.0)) >
               target)
      ++n;
    return n * dw;
  };
  long buffer = rungs_needed(0.5 * cfg.Jy, q);
  if (r > 0) buffer = std::max(buffer, rungs_needed(0.5 * cfg.Jx, r));
  // The supercell wrap couples the top r(q-1)+1 rungs to the bottom ones;
  // the seam filter must cover that whole set.
  const long seam = std::max({2L, long(r) * (q - 1) + 2, long(q) + 2});
  const long margin =
      std::max(long(opt.margin_rungs), buffer + seam);
  const long need = 2 * (opt.window_rungs + margin) + 2;
  if (need > 20000)
    throw FiberError(
        "GridMismatch: cross-validation window too large; F is too small "
        "for the requested tolerance");
  int K = opt.K;
  if (K == 0) {
    if (r == 0) {
      K = int(need);
    } else {
      K = int(std::ceil(double(need - r * (q - 1) - q * (r - 1)) /
                        double(r * q)));
    }
    if (K % 2) ++K;
    K = std::max(K, 4);
  }

  const auto nearest = [](double E, const std::vector<double>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (double s : set) best = std::min(best, std::abs(E - s));
    return best;
  };

  double worst = 0.0;
  for (double k : opt.k_values) {
    FiberOperator ring_op = build_fiber_rotated_basis(k, cfg, K);
    FiberSolution ring = solve_fiber(ring_op, true);
    const int n = ring_op.size;

    // Rung span of the periodized operator; energies are shifted so the
    // lowest rung sits at w = 0 in both methods.
    const long w_max = (r == 0)
                           ? long(K)
                           : long(r) * (long(K) * q - 1) + long(q) * (r - 1);
    const long w_mid = w_max / 2;
    const double shift = (r == 0) ? -edF * double(ring_op.p_min) : 0.0;
    const double E_lo = edF * double(w_mid - opt.window_rungs);
    const double E_hi = edF * double(w_mid + opt.window_rungs);

    std::vector<double> ring_all, ring_bulk;
    for (int j = 0; j < n; ++j) {
      const double E = ring.energies[j] + shift;
      ring_all.push_back(E);
      if (E < E_lo || E > E_hi) continue;
      double seam_mass = 0.0;
      if (r == 0) {
        seam_mass = edge_mass(ring.vectors.col(j), int(seam));
      } else {
        const int ringlen = K * q;
        for (int mu = 0; mu < r; ++mu)
          for (int p = 0; p < ringlen; ++p) {
            const long w = long(r) * p + long(q) * mu;
            if (w < seam || w > w_max - seam)
              seam_mass += std::norm(ring.vectors(mu * ringlen + p, j));
          }
      }
      if (seam_mass < 1e-12) ring_bulk.push_back(E);
    }
    if (ring_bulk.empty())
      throw FiberError("GridMismatch: empty bulk window in cross-validation");

    // Open-frame fiber on the same absolute rungs, matched quasimomentum.
    const double kappa = k / sc.d_tilde;
    const long p_lo = w_mid - (opt.window_rungs + margin);
    const long p_hi = w_mid + (opt.window_rungs + margin);
    FiberOperator fop = build_fiber_rotated_frame(kappa, cfg, p_lo, p_hi);
    FiberSolution frame = solve_fiber(fop, true);
    std::vector<double> frame_all(frame.energies.data(),
                                  frame.energies.data() + fop.size);
    std::vector<double> frame_bulk;
    const int edge = int(seam);
    for (int j = 0; j < fop.size; ++j) {
      const double E = frame.energies[j];
      if (E >= E_lo && E <= E_hi &&
          edge_mass(frame.vectors.col(j), edge) < 1e-12)
        frame_bulk.push_back(E);
    }
    if (frame_bulk.empty())
      throw FiberError("GridMismatch: empty frame window in cross-validation");

    for (double E : ring_bulk) worst = std::max(worst, nearest(E, frame_all));
    for (double E : frame_bulk) worst = std::max(worst, nearest(E, ring_all));
  }
  return worst;
}

}  // namespace cyclobloch
