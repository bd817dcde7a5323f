#include "cyclobloch/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

namespace cyclobloch {

namespace {

using Cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;

constexpr double kNormDriftPerUnitTime = 1e-9;

/* Forward-neighbor table of the strip with the row coefficients
 * <i|H|i+x_hat> and <i|H|i+y_hat> of a static gauge. */
struct HopTable {
  std::vector<long> xn, yn;  // -1 when the neighbor leaves the strip
  Vec cx, cy;                // row coefficients (conjugate of hop_*)
  Eigen::VectorXd diag;      // Stark term

  HopTable(const StripLattice& strip, Gauge g, const ModelConfig& cfg,
           bool with_diag) {
    const long n = strip.size();
    xn.assign(n, -1);
    yn.assign(n, -1);
    cx.resize(n);
    cy.resize(n);
    diag = Eigen::VectorXd::Zero(n);
    for (long i = 0; i < n; ++i) {
      const SiteIndex site = strip.physical(i);
      xn[i] = strip.index_physical(site.l + 1, site.m);
      yn[i] = strip.index_physical(site.l, site.m + 1);
      cx[i] = std::conj(hop_x(g, site, cfg));
      cy[i] = std::conj(hop_y(g, site, cfg));
      if (with_diag) diag[i] = stark_energy(site, cfg);
    }
  }

  /* out = H * in (Hermitian completion of the forward table). */
  void apply(const Vec& in, Vec& out) const {
    const long n = in.size();
    for (long i = 0; i < n; ++i) out[i] = diag[i] * in[i];
    for (long i = 0; i < n; ++i) {
      const Cplx v = in[i];
      if (xn[i] >= 0) {
        out[i] += cx[i] * in[xn[i]];
        out[xn[i]] += std::conj(cx[i]) * v;
      }
      if (yn[i] >= 0) {
        out[i] += cy[i] * in[yn[i]];
        out[yn[i]] += std::conj(cy[i]) * v;
      }
    }
  }

  /* out = (H*in - center*in)/half_width, the scaled operator of the
   * Chebyshev recurrence. */
  void apply_scaled(const Vec& in, Vec& out, double center,
                    double half_width) const {
    apply(in, out);
    out = (out - center * in) / half_width;
  }

  /* Time-dependent gauge: out = -i * H_td(t) * in, with the LandauX hops
   * dressed by exp(-i omega t) on the forward bonds and no diagonal. */
  void apply_td_deriv(const Vec& in, Vec& out, double t, double omega_x,
                      double omega_y) const {
    const long n = in.size();
    const Cplx gx = std::polar(1.0, -omega_x * t);
    const Cplx gy = std::polar(1.0, -omega_y * t);
    out.setZero();
    for (long i = 0; i < n; ++i) {
      const Cplx v = in[i];
      if (xn[i] >= 0) {
        const Cplx c = cx[i] * gx;
        out[i] += c * in[xn[i]];
        out[xn[i]] += std::conj(c) * v;
      }
      if (yn[i] >= 0) {
        const Cplx c = cy[i] * gy;
        out[i] += c * in[yn[i]];
        out[yn[i]] += std::conj(c) * v;
      }
    }
    out *= Cplx(0.0, -1.0);
  }
};

WavePacket td_to_landau_y(const Vec& amp_td, const StripLattice& strip,
                          double t, const ModelConfig& cfg) {
  const DerivedScales sc = derive_scales(cfg);
  WavePacket out;
  out.strip = strip;
  out.gauge = Gauge::LandauY;
  out.t = t;
  out.amp.resize(amp_td.size());
  for (long i = 0; i < amp_td.size(); ++i) {
    const SiteIndex site = strip.physical(i);
    const double phase = 2.0 * M_PI * cfg.alpha * double(site.l) * site.m -
                         (sc.omega_x * site.l + sc.omega_y * site.m) * t;
    out.amp[i] = amp_td[i] * std::polar(1.0, phase);
  }
  return out;
}

struct Recorder {
  const StripLattice& strip;
  const ModelConfig& cfg;
  const EvolveOptions& opts;
  EvolveResult& result;
  std::vector<double> pending_snapshots;

  Recorder(const StripLattice& s, const ModelConfig& c,
           const EvolveOptions& o, EvolveResult& r)
      : strip(s), cfg(c), opts(o), result(r) {
    pending_snapshots = opts.snapshot_times;
    std::sort(pending_snapshots.begin(), pending_snapshots.end());
  }

  /* Moments and leak are populations-only, hence gauge independent; the
   * raw stepping amplitudes can be sampled without conversion. */
  void sample(const Vec& amp, double t) {
    WavePacket view;
    view.strip = strip;
    view.t = t;
    view.amp = amp;
    const Moments mom = moments(view, cfg);
    const double lk = boundary_leak(view, opts.margin_fraction);
    result.series.append(t, mom, lk, amp.norm());
  }

  bool snapshot_due(double t, double half_step) {
    if (pending_snapshots.empty()) return false;
    if (pending_snapshots.front() <= t + half_step) {
      pending_snapshots.erase(pending_snapshots.begin());
      return true;
    }
    return false;
  }
};

void check_norm(double norm, double t, double* max_drift) {
  const double drift = std::abs(norm - 1.0);
  *max_drift = std::max(*max_drift, drift);
  if (drift > kNormDriftPerUnitTime * std::max(t, 1.0))
    throw PropagatorError("NormDrift: |norm-1| = " + std::to_string(drift) +
                          " at t = " + std::to_string(t));
}

}  // namespace

EvolveResult evolve_td_gauge(const WavePacket& psi0, double t_end, double dt,
                             const ModelConfig& cfg,
                             const EvolveOptions& opts) {
  const DerivedScales sc = derive_scales(cfg);
  const double rate =
      std::max({sc.omega_x, sc.omega_y, std::abs(cfg.Jx), std::abs(cfg.Jy)});
  if (!(dt > 0.0)) throw PropagatorError("StepTooLarge: dt must be positive");
  if (rate > 0.0 && dt > 0.05 / rate + 1e-12)
    throw PropagatorError("StepTooLarge: dt exceeds 0.05/max(omega, J)");
  if (!(t_end > 0.0)) throw PropagatorError("StepTooLarge: t_end must be > 0");

  const StripLattice strip = psi0.strip;
  /* psi_td(0) coincides with the LandauX amplitudes. */
  Vec psi = convert_gauge(psi0, Gauge::LandauX, cfg).amp;
  const HopTable table(strip, Gauge::LandauX, cfg, false);

  const long n_steps = std::max(1L, std::lround(std::ceil(t_end / dt - 1e-9)));
  const double h = t_end / double(n_steps);
  const long rec_every = std::max(1L, std::lround(opts.record_dt / h));

  EvolveResult result;
  result.dt_used = h;
  result.n_steps = n_steps;
  Recorder rec(strip, cfg, opts, result);
  rec.sample(psi, 0.0);
  if (rec.snapshot_due(0.0, 0.5 * h))
    result.snapshots.push_back(td_to_landau_y(psi, strip, 0.0, cfg));

  Vec k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()),
      tmp(psi.size());
  for (long step = 1; step <= n_steps; ++step) {
    const double t = h * double(step - 1);
    table.apply_td_deriv(psi, k1, t, sc.omega_x, sc.omega_y);
    tmp = psi + (0.5 * h) * k1;
    table.apply_td_deriv(tmp, k2, t + 0.5 * h, sc.omega_x, sc.omega_y);
    tmp = psi + (0.5 * h) * k2;
    table.apply_td_deriv(tmp, k3, t + 0.5 * h, sc.omega_x, sc.omega_y);
    tmp = psi + h * k3;
    table.apply_td_deriv(tmp, k4, t + h, sc.omega_x, sc.omega_y);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_now = h * double(step);
    if (step % rec_every == 0 || step == n_steps) {
      rec.sample(psi, t_now);
      check_norm(psi.norm(), t_now, &result.max_norm_drift);
    }
    if (rec.snapshot_due(t_now, 0.5 * h))
      result.snapshots.push_back(td_to_landau_y(psi, strip, t_now, cfg));
  }

  if (opts.keep_final)
    result.final_state = td_to_landau_y(psi, strip, t_end, cfg);
  return result;
}

std::vector<double> bessel_j_array(double x, int n_max) {
  std::vector<double> out(std::size_t(n_max) + 1, 0.0);
  if (n_max < 0) return out;
  if (x <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  /* Miller's downward recurrence, normalized by J0 + 2*sum J_{2k} = 1. */
  const int start =
      n_max + 16 + int(2.0 * std::sqrt(double(std::max(n_max, int(x) + 1))));
  double jp = 0.0, jc = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 0; --k) {
    const double jm = (2.0 * (k + 1) / x) * jc - jp;
    jp = jc;
    jc = jm;
    if (std::abs(jc) > 1e250) {
      const double scale = 1e-250;
      jc *= scale;
      jp *= scale;
      norm *= scale;
      for (auto& v : out) v *= scale;
    }
    if (k <= n_max) out[std::size_t(k)] = jc;
    if (k > 0 && k % 2 == 0) norm += 2.0 * jc;
  }
  norm += jc;
  for (auto& v : out) v /= norm;
  return out;
}

EvolveResult evolve_static_gauge(const WavePacket& psi0, double t_end,
                                 double slice_dt, const ModelConfig& cfg,
                                 double tol, const EvolveOptions& opts) {
  if (!(slice_dt > 0.0))
    throw PropagatorError("StepTooLarge: slice_dt must be positive");
  if (!(t_end > 0.0)) throw PropagatorError("StepTooLarge: t_end must be > 0");
  if (!(tol > 0.0) || tol > 1e-6)
    throw PropagatorError("BoundsTooTight: tolerance outside (0, 1e-6]");

  const StripLattice strip = psi0.strip;
  Vec psi = convert_gauge(psi0, Gauge::LandauY, cfg).amp;
  const HopTable table(strip, Gauge::LandauY, cfg, true);

  /* Gershgorin bounds, inflated by 5% on the half-width. */
  const double row_sum = std::abs(cfg.Jx) + std::abs(cfg.Jy);
  const double lo = table.diag.minCoeff() - row_sum;
  const double hi = table.diag.maxCoeff() + row_sum;
  const double center = 0.5 * (hi + lo);
  const double half_width = std::max(0.5 * (hi - lo) * 1.05, 1e-12);

  const long n_slices = std::max(1L, std::lround(std::ceil(t_end / slice_dt - 1e-9)));

  EvolveResult result;
  result.dt_used = slice_dt;
  result.n_steps = n_slices;
  Recorder rec(strip, cfg, opts, result);
  rec.sample(psi, 0.0);
  if (rec.snapshot_due(0.0, 0.5 * slice_dt)) {
    WavePacket snap{strip, Gauge::LandauY, 0.0, psi};
    result.snapshots.push_back(snap);
  }

  Vec phi0(psi.size()), phi1(psi.size()), phi2(psi.size()), acc(psi.size());
  std::vector<double> bessel;
  double tau_cached = -1.0;
  int order_cached = 0;

  double t = 0.0;
  double norm_prev = psi.norm();
  for (long slice = 1; slice <= n_slices; ++slice) {
    const double tau = (slice == n_slices) ? t_end - t : slice_dt;
    if (tau != tau_cached) {
      const double z = half_width * tau;
      int order = int(z + 24.0 * std::cbrt(z + 1.0) + 36.0);
      bessel = bessel_j_array(z, order);
      while (order > 1 && std::abs(2.0 * bessel[order]) < tol &&
             std::abs(2.0 * bessel[order - 1]) < tol && order > int(z) + 2)
        --order;
      if (std::abs(2.0 * bessel[std::size_t(order)]) >= tol)
        throw PropagatorError(
            "BoundsTooTight: Chebyshev tail above tolerance at order " +
            std::to_string(order));
      order_cached = order;
      tau_cached = tau;
    }

    /* exp(-iH tau) = exp(-ic tau) [J0 + 2 sum (-i)^k J_k T_k(Hscaled)] */
    phi0 = psi;
    table.apply_scaled(phi0, phi1, center, half_width);
    acc = bessel[0] * phi0;
    Cplx ik(0.0, -1.0);  // (-i)^k for k = 1
    acc += 2.0 * bessel[1] * ik * phi1;
    for (int k = 2; k <= order_cached; ++k) {
      table.apply_scaled(phi1, phi2, center, half_width);
      phi2 = 2.0 * phi2 - phi0;
      phi0.swap(phi1);
      phi1.swap(phi2);
      ik *= Cplx(0.0, -1.0);
      acc += 2.0 * bessel[std::size_t(k)] * ik * phi1;
    }
    psi = std::polar(1.0, -center * tau) * acc;
    t = (slice == n_slices) ? t_end : t + tau;

    const double norm_now = psi.norm();
    if (std::abs(norm_now - norm_prev) > 1e-8)
      throw PropagatorError(
          "BoundsTooTight: norm jumped by " +
          std::to_string(std::abs(norm_now - norm_prev)) + " in one slice");
    norm_prev = norm_now;
    rec.sample(psi, t);
    check_norm(norm_now, t, &result.max_norm_drift);
    if (rec.snapshot_due(t, 0.5 * slice_dt)) {
      WavePacket snap{strip, Gauge::LandauY, t, psi};
      result.snapshots.push_back(snap);
    }
  }

  if (opts.keep_final) {
    WavePacket fin{strip, Gauge::LandauY, t_end, psi};
    result.final_state = fin;
  }
  return result;
}

EnsembleResult ensemble_evolve(const StripLattice& strip, double C_x,
                               double C_y, int n_realizations,
                               std::uint64_t seed, EvolveScheme scheme,
                               double t_end, double step,
                               const ModelConfig& cfg, double tol,
                               const EvolveOptions& opts) {
  if (n_realizations < 1)
    throw PropagatorError("StepTooLarge: need at least one realization");
  EnsembleResult out;
  out.n_realizations = n_realizations;
  std::map<long, double> profile_bins;
  double profile_width = 1.0;

  for (int r = 0; r < n_realizations; ++r) {
    const WavePacket psi0 =
        gaussian_packet(strip, C_x, C_y, true, seed, std::uint64_t(r));
    EvolveResult run =
        scheme == EvolveScheme::TdGauge
            ? evolve_td_gauge(psi0, t_end, step, cfg, opts)
            : evolve_static_gauge(psi0, t_end, step, cfg, tol, opts);
    out.max_norm_drift = std::max(out.max_norm_drift, run.max_norm_drift);
    for (double lk : run.series.leak) out.max_leak = std::max(out.max_leak, lk);

    if (r == 0) {
      out.mean = run.series;
    } else {
      if (run.series.size() != out.mean.size())
        throw PropagatorError("StepTooLarge: realization sampling mismatch");
      for (std::size_t i = 0; i < run.series.size(); ++i) {
        out.mean.x_mean[i] += run.series.x_mean[i];
        out.mean.y_mean[i] += run.series.y_mean[i];
        out.mean.sigma[i] += run.series.sigma[i];
        out.mean.m2_eta[i] += run.series.m2_eta[i];
        out.mean.m2_xi[i] += run.series.m2_xi[i];
        out.mean.eta_mean[i] += run.series.eta_mean[i];
        out.mean.xi_mean[i] += run.series.xi_mean[i];
        out.mean.leak[i] += run.series.leak[i];
        out.mean.norm[i] += run.series.norm[i];
      }
    }
    const EtaProfile prof = project_eta(run.final_state, cfg);
    profile_width = prof.bin_width;
    for (std::size_t i = 0; i < prof.centers.size(); ++i)
      profile_bins[std::lround(prof.centers[i] / prof.bin_width)] +=
          prof.prob[i];
  }

  const double inv = 1.0 / double(n_realizations);
  for (std::size_t i = 0; i < out.mean.size(); ++i) {
    out.mean.x_mean[i] *= inv;
    out.mean.y_mean[i] *= inv;
    out.mean.sigma[i] *= inv;
    out.mean.m2_eta[i] *= inv;
    out.mean.m2_xi[i] *= inv;
    out.mean.eta_mean[i] *= inv;
    out.mean.xi_mean[i] *= inv;
    out.mean.leak[i] *= inv;
    out.mean.norm[i] *= inv;
  }
  out.final_profile.bin_width = profile_width;
  for (const auto& [k, p] : profile_bins) {
    out.final_profile.centers.push_back(k * profile_width);
    out.final_profile.prob.push_back(p * inv);
  }
  return out;
}

}  // namespace cyclobloch
