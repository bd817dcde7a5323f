#include "cyclobloch/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>

namespace cyclobloch {

namespace {

constexpr double kTransportSpeedFraction = 0.9;
constexpr double kTransportSigmaGrowth = 0.2;
constexpr double kBallisticResidual = 0.10;
constexpr double kLocalizedFactor = 3.0;
constexpr double kOscillatingRatio = 5.0;
constexpr double kOscillatingFreqTol = 0.03;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // ||y - yhat|| / ||y - mean||
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double yh = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - yh) * (y[i] - yh);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  fit.residual = ss_tot > 0 ? std::sqrt(ss_res / ss_tot)
                            : (ss_res > 0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace

std::pair<std::pair<double, double>, std::pair<double, double>>
frame_axes(const ModelConfig& cfg) {
  double ur, uq;
  if (cfg.dir.rational) {
    const double n = std::hypot(double(cfg.dir.r), double(cfg.dir.q));
    ur = cfg.dir.r / n;
    uq = cfg.dir.q / n;
  } else {
    const double beta = cfg.dir.beta();
    const double n = std::hypot(beta, 1.0);
    ur = beta / n;
    uq = 1.0 / n;
  }
  // eta = uq*x - ur*y, xi = ur*x + uq*y
  return {{uq, -ur}, {ur, uq}};
}

Moments moments(const WavePacket& psi, const ModelConfig& cfg) {
  const auto axes = frame_axes(cfg);
  const double ex = axes.first.first, ey = axes.first.second;
  const double fx = axes.second.first, fy = axes.second.second;
  double w_sum = 0, x1 = 0, y1 = 0, q2 = 0, e1 = 0, e2 = 0, s1 = 0, s2 = 0;
  for (long i = 0; i < psi.amp.size(); ++i) {
    const double w = std::norm(psi.amp[i]);
    if (w == 0.0) continue;
    const SiteIndex site = psi.strip.physical(i);
    const double x = double(site.l), y = double(site.m);
    const double eta = ex * x + ey * y;
    const double xi = fx * x + fy * y;
    w_sum += w;
    x1 += w * x;
    y1 += w * y;
    q2 += w * (x * x + y * y);
    e1 += w * eta;
    e2 += w * eta * eta;
    s1 += w * xi;
    s2 += w * xi * xi;
  }
  Moments mom;
  if (w_sum <= 0.0) return mom;
  mom.x_mean = x1 / w_sum;
  mom.y_mean = y1 / w_sum;
  mom.M2 = q2 / w_sum;
  mom.eta_mean = e1 / w_sum;
  mom.xi_mean = s1 / w_sum;
  mom.sigma = std::sqrt(std::max(
      0.0, mom.M2 - mom.x_mean * mom.x_mean - mom.y_mean * mom.y_mean));
  mom.m2_eta = std::max(0.0, e2 / w_sum - mom.eta_mean * mom.eta_mean);
  mom.m2_xi = std::max(0.0, s2 / w_sum - mom.xi_mean * mom.xi_mean);
  return mom;
}

void ObservableSeries::append(double t, const Moments& mom, double leak_value,
                              double norm_value) {
  times.push_back(t);
  x_mean.push_back(mom.x_mean);
  y_mean.push_back(mom.y_mean);
  sigma.push_back(mom.sigma);
  m2_eta.push_back(mom.m2_eta);
  m2_xi.push_back(mom.m2_xi);
  eta_mean.push_back(mom.eta_mean);
  xi_mean.push_back(mom.xi_mean);
  leak.push_back(leak_value);
  norm.push_back(norm_value);
}

EtaProfile project_eta(const WavePacket& psi, const ModelConfig& cfg,
                       double bin_width) {
  if (bin_width <= 0.0) bin_width = derive_scales(cfg).d;
  const auto axes = frame_axes(cfg);
  const double ex = axes.first.first, ey = axes.first.second;
  std::map<long, double> bins;
  for (long i = 0; i < psi.amp.size(); ++i) {
    const double w = std::norm(psi.amp[i]);
    if (w == 0.0) continue;
    const SiteIndex site = psi.strip.physical(i);
    const double eta = ex * site.l + ey * site.m;
    bins[std::lround(eta / bin_width)] += w;
  }
  EtaProfile prof;
  prof.bin_width = bin_width;
  prof.centers.reserve(bins.size());
  prof.prob.reserve(bins.size());
  for (const auto& [k, p] : bins) {
    prof.centers.push_back(k * bin_width);
    prof.prob.push_back(p);
  }
  return prof;
}

FitResult ballistic_fit(const ObservableSeries& series, double t_lo,
                        double t_hi) {
  std::vector<double> ts, ws;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.times[i] < t_lo || series.times[i] > t_hi) continue;
    ts.push_back(series.times[i]);
    ws.push_back(std::sqrt(series.m2_eta[i]));
  }
  if (ts.size() < 10)
    throw ObservablesError("WindowTooShort: ballistic fit needs >= 10 samples");
  const LineFit fit = fit_line(ts, ws);
  FitResult out;
  out.coefficient = fit.slope;
  out.exponent = 1.0;
  out.intercept = fit.intercept;
  out.residual = fit.residual;
  out.window_lo = t_lo;
  out.window_hi = t_hi;
  out.n = long(ts.size());
  return out;
}

FitResult scaling_fit(const std::vector<std::pair<double, double>>& A_of_F) {
  if (A_of_F.size() < 2)
    throw ObservablesError("WindowTooShort: scaling fit needs >= 2 points");
  std::vector<double> lf, la;
  for (const auto& [F, A] : A_of_F) {
    if (!(F > 0.0) || !(A > 0.0))
      throw ObservablesError("NonpositiveData: scaling fit needs F, A > 0");
    lf.push_back(std::log(F));
    la.push_back(std::log(A));
  }
  const LineFit fit = fit_line(lf, la);
  FitResult out;
  out.coefficient = std::exp(fit.intercept);
  out.exponent = fit.slope;
  out.intercept = fit.intercept;
  out.residual = fit.residual;
  out.window_lo = A_of_F.front().first;
  out.window_hi = A_of_F.back().first;
  out.n = long(A_of_F.size());
  return out;
}

double transient_estimate(const ObservableSeries& series) {
  if (series.size() == 0) return std::numeric_limits<double>::infinity();
  const double w0 = std::sqrt(series.m2_eta.front());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::sqrt(series.m2_eta[i]) > 2.0 * w0) return series.times[i];
  }
  return std::numeric_limits<double>::infinity();
}

std::pair<double, double> default_fit_window(const ObservableSeries& series,
                                             double leak_tol) {
  if (series.size() == 0) return {0.0, 0.0};
  const double horizon = series.times.back();
  double lo = 0.1 * horizon;
  const double transient = transient_estimate(series);
  if (std::isfinite(transient)) lo = std::max(lo, transient);
  double hi = horizon;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.leak[i] > leak_tol) {
      hi = series.times[i];
      break;
    }
  }
  return {lo, hi};
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Transporting: return "transporting";
    case Regime::Ballistic: return "ballistic";
    case Regime::Localized: return "localized";
    case Regime::Oscillating: return "oscillating";
    case Regime::Ambiguous: return "ambiguous";
  }
  return "ambiguous";
}

namespace {

/* Peak-to-median ratio of the discrete spectrum of a detrended series,
 * restricted to peaks near omega_target (relative tolerance + one grid
 * step).  Returns 0 when no bin matches. */
double spectral_peak_score(const std::vector<double>& t,
                           const std::vector<double>& x, double omega_target) {
  const std::size_t n = t.size();
  if (n < 16 || !(omega_target > 0.0)) return 0.0;
  const double T = t.back() - t.front();
  if (!(T > 0.0)) return 0.0;
  std::vector<double> y = x;
  {
    const LineFit trend = fit_line(t, x);
    for (std::size_t i = 0; i < n; ++i)
      y[i] -= trend.intercept + trend.slope * t[i];
  }
  const double dw = 2.0 * M_PI / T;
  const std::size_t n_freq = n / 2;
  if (n_freq < 4) return 0.0;
  std::vector<double> mag(n_freq);
  double peak = 0.0, peak_omega = 0.0;
  for (std::size_t j = 1; j <= n_freq; ++j) {
    const double w = dw * double(j);
    double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
      re += y[i] * std::cos(w * t[i]);
      im += y[i] * std::sin(w * t[i]);
    }
    mag[j - 1] = std::hypot(re, im);
    if (mag[j - 1] > peak) {
      peak = mag[j - 1];
      peak_omega = w;
    }
  }
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double background = sorted[sorted.size() / 2];
  if (!(background > 0.0)) return 0.0;
  const double tol = std::max(kOscillatingFreqTol * omega_target, 1.5 * dw);
  if (std::abs(peak_omega - omega_target) > tol) return 0.0;
  return peak / background;
}

}  // namespace

Classification classify_regime(const ObservableSeries& series,
                               const ModelConfig& cfg) {
  if (series.size() < 16)
    throw ObservablesError("WindowTooShort: classification needs >= 16 samples");
  const DerivedScales sc = derive_scales(cfg);
  Classification out;
  const double t_end = series.times.back() - series.times.front();

  const double dx = series.x_mean.back() - series.x_mean.front();
  const double dy = series.y_mean.back() - series.y_mean.front();
  const double displacement = std::hypot(dx, dy);
  const double sigma0 = std::max(series.sigma.front(), 1e-12);
  const double sigma_growth = (series.sigma.back() - series.sigma.front()) / sigma0;
  if (std::abs(sc.v_star) > 0.0 && t_end > 0.0) {
    const double speed_ratio =
        displacement / (kTransportSpeedFraction * std::abs(sc.v_star) * t_end);
    out.score_transporting =
        sigma_growth < kTransportSigmaGrowth ? speed_ratio : 0.0;
  }

  double ball_residual = 1.0, ball_slope = 0.0;
  const auto window = default_fit_window(series);
  try {
    const FitResult fit = ballistic_fit(series, window.first, window.second);
    ball_residual = fit.residual;
    ball_slope = fit.coefficient;
  } catch (const ObservablesError&) {
  }
  out.score_ballistic = ball_slope > 0.0
                            ? kBallisticResidual / std::max(ball_residual, 1e-12)
                            : 0.0;

  const double w0 = std::max(std::sqrt(series.m2_eta.front()), 1.0);
  double w_max = 0.0;
  for (double v : series.m2_eta) w_max = std::max(w_max, std::sqrt(v));
  out.score_localized = w_max > 0.0 ? kLocalizedFactor * w0 / w_max
                                    : kLocalizedFactor;

  const double rx = spectral_peak_score(series.times, series.x_mean, sc.omega_x);
  const double ry = spectral_peak_score(series.times, series.y_mean, sc.omega_y);
  out.score_oscillating = std::max(rx, ry) / kOscillatingRatio;

  const bool transporting = out.score_transporting >= 1.0;
  const bool ballistic = out.score_ballistic >= 1.0;
  const bool localized = out.score_localized >= 1.0;
  const bool oscillating = out.score_oscillating >= 1.0;

  if (transporting)
    out.regime = Regime::Transporting;
  else if (oscillating && localized)
    out.regime = Regime::Oscillating;
  else if (ballistic && !localized)
    out.regime = Regime::Ballistic;
  else if (localized)
    out.regime = Regime::Localized;
  else if (ballistic)
    out.regime = Regime::Ballistic;
  else if (oscillating)
    out.regime = Regime::Oscillating;
  else
    out.regime = Regime::Ambiguous;
  return out;
}

OscillationFit fit_oscillation(const std::vector<double>& times,
                               const std::vector<double>& values,
                               double omega_lo, double omega_hi) {
  const std::size_t n = times.size();
  if (n < 16 || values.size() != n)
    throw ObservablesError("WindowTooShort: oscillation fit needs >= 16 samples");
  if (!(omega_lo > 0.0) || !(omega_hi > omega_lo))
    throw ObservablesError("NonpositiveData: bad frequency window");
  double mean = 0;
  for (double v : values) mean += v;
  mean /= double(n);
  double ss_tot = 0;
  for (double v : values) ss_tot += (v - mean) * (v - mean);

  OscillationFit best;
  const int n_scan = 400;
  for (int k = 0; k <= n_scan; ++k) {
    const double w = omega_lo + (omega_hi - omega_lo) * double(k) / n_scan;
    // least squares for a + b cos(wt) + c sin(wt)
    double s1 = n, sc = 0, ss = 0, scc = 0, sss = 0, scs = 0;
    double sy = 0, syc = 0, sys = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ct = std::cos(w * times[i]), st = std::sin(w * times[i]);
      sc += ct;
      ss += st;
      scc += ct * ct;
      sss += st * st;
      scs += ct * st;
      sy += values[i];
      syc += values[i] * ct;
      sys += values[i] * st;
    }
    // solve the 3x3 normal equations by Cramer's rule
    const double a11 = s1, a12 = sc, a13 = ss;
    const double a22 = scc, a23 = scs, a33 = sss;
    const double det = a11 * (a22 * a33 - a23 * a23) -
                       a12 * (a12 * a33 - a23 * a13) +
                       a13 * (a12 * a23 - a22 * a13);
    if (std::abs(det) < 1e-12) continue;
    const double b1 = sy, b2 = syc, b3 = sys;
    const double a =
        (b1 * (a22 * a33 - a23 * a23) - a12 * (b2 * a33 - a23 * b3) +
         a13 * (b2 * a23 - a22 * b3)) /
        det;
    const double b =
        (a11 * (b2 * a33 - b3 * a23) - b1 * (a12 * a33 - a23 * a13) +
         a13 * (a12 * b3 - b2 * a13)) /
        det;
    const double c =
        (a11 * (a22 * b3 - b2 * a23) + a12 * (b2 * a13 - a12 * b3) +
         b1 * (a12 * a23 - a22 * a13)) /
        det;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yh =
          a + b * std::cos(w * times[i]) + c * std::sin(w * times[i]);
      ss_res += (values[i] - yh) * (values[i] - yh);
    }
    const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    if (r2 > best.r2) {
      best.omega = w;
      best.amplitude = std::hypot(b, c);
      best.offset = a;
      best.r2 = r2;
    }
  }
  return best;
}

}  // namespace cyclobloch
