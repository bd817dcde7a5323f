#include "cyclobloch/classical.hpp"

#include <cmath>

namespace cyclobloch {

namespace {

struct DrivenFlow {
  double Jpx, Jpy, wx, wy;
  explicit DrivenFlow(const ModelConfig& cfg) {
    const DerivedScales sc = derive_scales(cfg);
    Jpx = 2.0 * M_PI * cfg.alpha * cfg.Jx;
    Jpy = 2.0 * M_PI * cfg.alpha * cfg.Jy;
    wx = sc.omega_x;
    wy = sc.omega_y;
  }
  double dY(double t, double Y, double P) const {
    (void)Y;
    return Jpy * std::sin(P - wy * t);
  }
  double dP(double t, double Y, double P) const {
    (void)P;
    return -Jpx * std::sin(Y + wx * t);
  }
};

void rk4_step(const DrivenFlow& f, double& t, double& Y, double& P,
              double h) {
  const double k1y = f.dY(t, Y, P), k1p = f.dP(t, Y, P);
  const double k2y = f.dY(t + h / 2, Y + h / 2 * k1y, P + h / 2 * k1p);
  const double k2p = f.dP(t + h / 2, Y + h / 2 * k1y, P + h / 2 * k1p);
  const double k3y = f.dY(t + h / 2, Y + h / 2 * k2y, P + h / 2 * k2p);
  const double k3p = f.dP(t + h / 2, Y + h / 2 * k2y, P + h / 2 * k2p);
  const double k4y = f.dY(t + h, Y + h * k3y, P + h * k3p);
  const double k4p = f.dP(t + h, Y + h * k3y, P + h * k3p);
  Y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
  P += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
  t += h;
}

/* Strang splitting: the flow separates into a kick in Y (depends on P, t)
 * and a kick in P (depends on Y, t); freezing t per substep keeps each
 * shear area-preserving and the composition second-order accurate. */
void symplectic2_step(const DrivenFlow& f, double& t, double& Y, double& P,
                      double h) {
  Y += h / 2 * f.dY(t, Y, P);
  const double tm = t + h / 2;
  P += h * f.dP(tm, Y, P);
  t += h;
  Y += h / 2 * f.dY(t, Y, P);
}

}  // namespace

double wrap_pi(double x) {
  return x - 2.0 * M_PI * std::floor((x + M_PI) / (2.0 * M_PI));
}

double h_autonomous(const ClassicalState& s, const ModelConfig& cfg) {
  validate(cfg);
  if (cfg.alpha == 0.0)
    throw ClassicalError(
        "UndefinedScaledField: calF = F/(2 pi alpha) needs alpha != 0");
  const DerivedScales sc = derive_scales(cfg);
  return -cfg.Jy * std::cos(s.P) - cfg.Jx * std::cos(s.Y) +
         sc.calF_y * s.Y + sc.calF_x * s.P;
}

std::pair<double, double> rhs_driven(double t, const ClassicalState& s,
                                     const ModelConfig& cfg) {
  const DrivenFlow f(cfg);
  return {f.dY(t, s.Y, s.P), f.dP(t, s.Y, s.P)};
}

double integral_of_motion(double t, const ClassicalState& s,
                          const ModelConfig& cfg) {
  const DrivenFlow f(cfg);
  const double h = -f.Jpy * std::cos(s.P - f.wy * t) -
                   f.Jpx * std::cos(s.Y + f.wx * t);
  return h + f.wy * s.Y + f.wx * s.P;
}

TrajectoryRecord integrate(const ClassicalState& s0, double t_end, double dt,
                           const ModelConfig& cfg, IntegratorScheme scheme,
                           long record_every) {
  validate(cfg);
  if (dt <= 0.0) throw ClassicalError("StepTooLarge: dt must be positive");
  if (record_every < 1) record_every = 1;

  const DrivenFlow f(cfg);
  const long steps = std::max(1L, long(std::llround(t_end / dt)));
  const double h = t_end / double(steps);

  TrajectoryRecord rec;
  double t = s0.t, Y = s0.Y, P = s0.P;
  const double I0 = integral_of_motion(t, {Y, P, t}, cfg);
  rec.samples.push_back({Y, P, t});
  rec.energies.push_back(I0);

  for (long i = 1; i <= steps; ++i) {
    if (scheme == IntegratorScheme::RK4)
      rk4_step(f, t, Y, P, h);
    else
      symplectic2_step(f, t, Y, P, h);
    const double I = integral_of_motion(t, {Y, P, t}, cfg);
    rec.max_drift = std::max(rec.max_drift, std::abs(I - I0));
    if (i % record_every == 0 || i == steps) {
      rec.samples.push_back({Y, P, t});
      rec.energies.push_back(I);
    }
  }
  rec.drift_per_time = (t_end > 0) ? rec.max_drift / t_end : 0.0;
  rec.step_too_large = rec.drift_per_time > 1e-6;
  return rec;
}

double common_period(const ModelConfig& cfg) {
  validate(cfg);
  if (!cfg.dir.rational)
    throw ClassicalError(
        "IrrationalDirection: no common period; use poincare_map_ty");
  const DerivedScales sc = derive_scales(cfg);
  if (sc.omega_y <= 0.0)
    throw ClassicalError("UndefinedScaledField: common period needs F > 0");
  return 2.0 * M_PI * cfg.dir.q / sc.omega_y;
}

namespace {

std::vector<std::pair<double, double>> sample_at_period(
    const ClassicalState& s0, int n_samples, double T, const ModelConfig& cfg,
    IntegratorScheme scheme, bool wrap, int r_corr, int q_corr) {
  const DrivenFlow f(cfg);
  const long substeps = 1000;  // dt = T/1000
  const double h = T / double(substeps);
  std::vector<std::pair<double, double>> out;
  out.reserve(n_samples);
  double t = s0.t, Y = s0.Y, P = s0.P;
  for (int j = 0; j < n_samples; ++j) {
    const double Yc = Y + 2.0 * M_PI * r_corr * double(j);
    const double Pc = P - 2.0 * M_PI * q_corr * double(j);
    out.emplace_back(wrap ? wrap_pi(Yc) : Yc, wrap ? wrap_pi(Pc) : Pc);
    for (long i = 0; i < substeps; ++i) {
      if (scheme == IntegratorScheme::RK4)
        rk4_step(f, t, Y, P, h);
      else
        symplectic2_step(f, t, Y, P, h);
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> stroboscopic_map(
    const ClassicalState& s0, int n_periods, const ModelConfig& cfg,
    IntegratorScheme scheme) {
  const double T = common_period(cfg);
  return sample_at_period(s0, n_periods, T, cfg, scheme, true, 0, 0);
}

std::vector<std::pair<double, double>> poincare_map_ty(
    const ClassicalState& s0, int n_samples, const ModelConfig& cfg,
    IntegratorScheme scheme) {
  validate(cfg);
  const DerivedScales sc = derive_scales(cfg);
  if (sc.omega_y <= 0.0)
    throw ClassicalError("UndefinedScaledField: Poincare section needs F > 0");
  const double Ty = 2.0 * M_PI / sc.omega_y;
  return sample_at_period(s0, n_samples, Ty, cfg, scheme, true, 0, 0);
}

double island_scan(const ModelConfig& cfg,
                   const std::vector<std::pair<double, double>>& seeds,
                   int n_periods) {
  const double T = common_period(cfg);
  if (seeds.empty()) return 0.0;
  int bounded = 0;
  for (const auto& [Y0, P0] : seeds) {
    // Unwrapped samples with the secular drift of the co-moving frame
    // removed: Y + 2 pi r j, P - 2 pi q j stay put on a transporting island.
    const auto traj = sample_at_period({Y0, P0, 0.0}, n_periods, T, cfg,
                                       IntegratorScheme::RK4, false,
                                       cfg.dir.r, cfg.dir.q);
    double ylo = traj[0].first, yhi = traj[0].first;
    double plo = traj[0].second, phi = traj[0].second;
    for (const auto& [Y, P] : traj) {
      ylo = std::min(ylo, Y);
      yhi = std::max(yhi, Y);
      plo = std::min(plo, P);
      phi = std::max(phi, P);
    }
    if (yhi - ylo < 2.0 * M_PI && phi - plo < 2.0 * M_PI) ++bounded;
  }
  return double(bounded) / double(seeds.size());
}

std::vector<std::pair<double, double>> default_portrait_seeds(int n) {
  std::vector<std::pair<double, double>> seeds;
  seeds.reserve(n);
  for (int i = 0; i < n; ++i)
    seeds.emplace_back(-M_PI + 2.0 * M_PI * (i + 0.5) / double(n), 0.0);
  return seeds;
}

}  // namespace cyclobloch
