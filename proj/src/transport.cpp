#include "cyclobloch/transport.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace cyclobloch {

namespace {

using Cplx = std::complex<double>;

constexpr double kLostOverlap = 0.5;
constexpr double kTrustOverlap = 0.85;

/* Deterministic reference phase: largest-modulus entry real positive. */
void fix_reference_phase(Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best > 0.0) v *= std::conj(v[imax]) / std::abs(v[imax]);
}

struct LinePoint {
  double kappa;
  double energy;
  Eigen::VectorXcd vec;
};

double fitted_slope(const std::vector<double>& k, const std::vector<double>& e) {
  const std::size_t n = k.size();
  double mk = 0, me = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mk += k[i];
    me += e[i];
  }
  mk /= double(n);
  me /= double(n);
  double skk = 0, ske = 0;
  for (std::size_t i = 0; i < n; ++i) {
    skk += (k[i] - mk) * (k[i] - mk);
    ske += (k[i] - mk) * (e[i] - me);
  }
  return skk > 0 ? ske / skk : 0.0;
}

DiabaticLine collect(std::vector<LinePoint>& pts, long p_min, long p_max,
                     double min_overlap, double seed_kappa, int seed_band) {
  std::sort(pts.begin(), pts.end(),
            [](const LinePoint& a, const LinePoint& b) { return a.kappa < b.kappa; });
  DiabaticLine line;
  line.p_min = p_min;
  line.p_max = p_max;
  line.min_overlap = min_overlap;
  line.seed_kappa = seed_kappa;
  line.seed_band = seed_band;
  line.vectors.resize(pts.front().vec.size(), Eigen::Index(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    line.kappa_samples.push_back(pts[j].kappa);
    line.energies.push_back(pts[j].energy);
    line.vectors.col(Eigen::Index(j)) = pts[j].vec;
  }
  line.slope = fitted_slope(line.kappa_samples, line.energies);
  return line;
}

/* Diabatic walker.  A plain "largest overlap with the previous vector"
 * rule tracks the adiabatic branches and bends off the line at every
 * avoided crossing once the grid resolves the crossing.  The diabatic
 * line is near-straight in energy, so the walker predicts the next
 * energy from a straight-line fit of the accepted samples, shortlists
 * the few eigenpairs nearest that prediction, and only ranks those by
 * overlap with the vector extrapolation.  Stored vectors are the exact
 * eigenpairs, phase-aligned to a real-positive successive overlap. */
struct Walker {
  Eigen::VectorXcd cur;
  Eigen::VectorXcd prev;
  Eigen::VectorXcd out;
  bool has_prev = false;
  std::vector<double> acc_kappa;
  std::vector<double> acc_energy;

  static constexpr std::size_t kFitBaseline = 40;
  static constexpr int kShortlist = 3;

  Walker(const Eigen::VectorXcd& v0, double kappa0, double e0) : cur(v0) {
    acc_kappa.push_back(kappa0);
    acc_energy.push_back(e0);
  }

  double predicted_energy(double kappa) const {
    const std::size_t n = std::min(acc_kappa.size(), kFitBaseline);
    const std::size_t off = acc_kappa.size() - n;
    if (n < 2) return acc_energy.back();
    double mk = 0, me = 0;
    for (std::size_t i = off; i < acc_kappa.size(); ++i) {
      mk += acc_kappa[i];
      me += acc_energy[i];
    }
    mk /= double(n);
    me /= double(n);
    double skk = 0, ske = 0;
    for (std::size_t i = off; i < acc_kappa.size(); ++i) {
      skk += (acc_kappa[i] - mk) * (acc_kappa[i] - mk);
      ske += (acc_kappa[i] - mk) * (acc_energy[i] - me);
    }
    const double slope = skk > 0 ? ske / skk : 0.0;
    return me + slope * (kappa - mk);
  }

  int step(const Eigen::VectorXd& energies, const Eigen::MatrixXcd& candidates,
           double* min_overlap, double kappa) {
    if (candidates.cols() == 0)
      throw TransportError("LineLost: no retained eigenpairs at kappa = " +
                           std::to_string(kappa));
    Eigen::VectorXcd pred = has_prev ? (2.0 * cur - prev).eval() : cur;
    pred.normalize();

    std::vector<int> shortlist;
    if (acc_kappa.size() >= 2) {
      const double e_pred = predicted_energy(kappa);
      std::vector<int> order(std::size_t(energies.size()));
      for (std::size_t j = 0; j < order.size(); ++j) order[j] = int(j);
      const int keep = std::min<int>(kShortlist, int(order.size()));
      std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                        [&](int a, int b) {
                          return std::abs(energies[a] - e_pred) <
                                 std::abs(energies[b] - e_pred);
                        });
      shortlist.assign(order.begin(), order.begin() + keep);
    } else {
      shortlist.resize(std::size_t(candidates.cols()));
      for (std::size_t j = 0; j < shortlist.size(); ++j) shortlist[j] = int(j);
    }

    int jbest = shortlist.front();
    double best = -1.0;
    for (int j : shortlist) {
      const double a = std::abs(candidates.col(j).dot(pred));
      if (a > best) {
        best = a;
        jbest = j;
      }
    }
    if (best < kLostOverlap)
      throw TransportError("LineLost: best overlap " + std::to_string(best) +
                           " at kappa = " + std::to_string(kappa));

    const Cplx succ = candidates.col(jbest).dot(cur);  // <cand|cur>
    const double mag = std::abs(succ);
    *min_overlap = std::min(*min_overlap, mag);
    out = mag > 0.0 ? (candidates.col(jbest) * (succ / mag)).eval()
                    : Eigen::VectorXcd(candidates.col(jbest));
    /* A column at a symmetric crossing returns half-and-half mixtures
     * of the two branches; feeding one into the memory would steer the
     * extrapolation onto the wrong branch afterwards.  Record it, but
     * keep predicting from the last confident sample. */
    if (mag >= kTrustOverlap) {
      prev = cur;
      has_prev = true;
      cur = out;
      acc_kappa.push_back(kappa);
      acc_energy.push_back(energies[jbest]);
    }
    return jbest;
  }
};

}  // namespace

DiabaticLine follow_line(const SpectrumResult& spectrum,
                         std::pair<double, int> seed) {
  const std::size_t nk = spectrum.kappa_grid.size();
  if (nk < 2) throw TransportError("LineLost: spectrum has fewer than 2 slices");
  if (spectrum.vectors.size() != nk)
    throw TransportError("MissingVectors: spectrum computed without vectors");

  std::size_t i0 = 0;
  for (std::size_t i = 1; i < nk; ++i)
    if (std::abs(spectrum.kappa_grid[i] - seed.first) <
        std::abs(spectrum.kappa_grid[i0] - seed.first))
      i0 = i;
  if (seed.second < 0 || seed.second >= int(spectrum.energies[i0].size()))
    throw TransportError("LineLost: seed band index out of range");

  double min_overlap = 1.0;
  std::vector<LinePoint> pts;
  Eigen::VectorXcd cur = spectrum.vectors[i0].col(seed.second);
  fix_reference_phase(cur);
  pts.push_back({spectrum.kappa_grid[i0], spectrum.energies[i0][seed.second], cur});

  const auto energies_at = [&](std::size_t i) {
    return Eigen::Map<const Eigen::VectorXd>(
        spectrum.energies[i].data(), Eigen::Index(spectrum.energies[i].size()));
  };
  Walker right(cur, spectrum.kappa_grid[i0], spectrum.energies[i0][seed.second]);
  for (std::size_t i = i0 + 1; i < nk; ++i) {
    const int j = right.step(energies_at(i), spectrum.vectors[i], &min_overlap,
                             spectrum.kappa_grid[i]);
    pts.push_back({spectrum.kappa_grid[i], spectrum.energies[i][j], right.out});
  }
  Walker left(cur, spectrum.kappa_grid[i0], spectrum.energies[i0][seed.second]);
  for (std::size_t step = 0; step < i0; ++step) {
    const std::size_t i = i0 - 1 - step;
    const int j = left.step(energies_at(i), spectrum.vectors[i], &min_overlap,
                            spectrum.kappa_grid[i]);
    pts.push_back({spectrum.kappa_grid[i], spectrum.energies[i][j], left.out});
  }
  return collect(pts, spectrum.p_min, spectrum.p_max, min_overlap, seed.first,
                 seed.second);
}

DiabaticLine follow_line_scan(const ModelConfig& cfg,
                              const std::vector<double>& kappa_grid,
                              double kappa0, int band_index, long p_min,
                              long p_max) {
  if (kappa_grid.size() < 2)
    throw TransportError("LineLost: need at least 2 kappa samples");
  std::vector<double> grid = kappa_grid;
  std::sort(grid.begin(), grid.end());

  std::size_t i0 = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - kappa0) < std::abs(grid[i0] - kappa0)) i0 = i;

  const auto solve_at = [&](double kappa) {
    const FiberOperator op = build_fiber_rotated_frame(kappa, cfg, p_min, p_max);
    return solve_fiber(op, true);
  };

  const FiberSolution sol0 = solve_at(grid[i0]);
  if (band_index < 0 || band_index >= sol0.energies.size())
    throw TransportError("LineLost: seed band index out of range");

  double min_overlap = 1.0;
  std::vector<LinePoint> pts;
  Eigen::VectorXcd cur = sol0.vectors.col(band_index);
  fix_reference_phase(cur);
  pts.push_back({grid[i0], sol0.energies[band_index], cur});

  Walker right(cur, grid[i0], sol0.energies[band_index]);
  for (std::size_t i = i0 + 1; i < grid.size(); ++i) {
    const FiberSolution sol = solve_at(grid[i]);
    const int j = right.step(sol.energies, sol.vectors, &min_overlap, grid[i]);
    pts.push_back({grid[i], sol.energies[j], right.out});
  }
  Walker left(cur, grid[i0], sol0.energies[band_index]);
  for (std::size_t step = 0; step < i0; ++step) {
    const std::size_t i = i0 - 1 - step;
    const FiberSolution sol = solve_at(grid[i]);
    const int j = left.step(sol.energies, sol.vectors, &min_overlap, grid[i]);
    pts.push_back({grid[i], sol.energies[j], left.out});
  }
  return collect(pts, p_min, p_max, min_overlap, kappa0, band_index);
}

DiabaticLine auto_follow(const SpectrumResult& spectrum,
                         const ModelConfig& cfg) {
  const DerivedScales sc = derive_scales(cfg);
  if (spectrum.kappa_grid.empty())
    throw TransportError("LineLost: empty spectrum");
  const long n = long(spectrum.kappa_grid.size());
  const long i_mid = n / 2;

  /* Seed columns, midmost first.  A seed sitting exactly on a symmetric
   * crossing hands the walker a degenerate mixture it cannot follow, so
   * nearby off-centre columns are kept as fallbacks. */
  std::vector<long> seeds;
  for (long off : {0L, 1L, -1L, n / 8, -(n / 8)}) {
    const long i = i_mid + off;
    if (i >= 0 && i < n &&
        std::find(seeds.begin(), seeds.end(), i) == seeds.end())
      seeds.push_back(i);
  }

  const long min_run = std::max<long>(4, n / 8);
  DiabaticLine best;
  bool found = false;
  for (long i_seed : seeds) {
    const std::size_t is = std::size_t(i_seed);
    for (int band = 0; band < int(spectrum.energies[is].size()); ++band) {
      DiabaticLine line;
      try {
        line = follow_line(spectrum, {spectrum.kappa_grid[is], band});
      } catch (const TransportError&) {
        continue;
      }
      /* the transporting line is straight globally */
      if (std::abs(line.slope - sc.v_star) > 0.2 * std::abs(sc.v_star))
        continue;
      /* ... and locally: demand an unbroken run of good slopes */
      long run = 0, cur_run = 0;
      for (std::size_t j = 0; j + 1 < line.kappa_samples.size(); ++j) {
        const double dk = line.kappa_samples[j + 1] - line.kappa_samples[j];
        const double s = dk != 0.0
                             ? (line.energies[j + 1] - line.energies[j]) / dk
                             : sc.v_star;
        if (std::abs(s - sc.v_star) <= 0.2 * std::abs(sc.v_star))
          ++cur_run;
        else
          cur_run = 0;
        run = std::max(run, cur_run);
      }
      if (run < min_run) continue;
      const double e_mid = std::abs(line.energies[std::size_t(i_mid)]);
      if (!found || line.min_overlap > best.min_overlap ||
          (line.min_overlap == best.min_overlap &&
           e_mid < std::abs(best.energies[std::size_t(i_mid)]))) {
        best = line;
        found = true;
      }
    }
    if (found && best.min_overlap >= 0.9) break;
  }
  if (!found)
    throw TransportError(
        "LineLost: no near-linear segment with slope close to v*");
  return best;
}

double GaussianEnvelope::operator()(double kappa) const {
  const double u = d * (kappa - kappa_center) / (2.0 * M_PI);
  return std::exp(-C * u * u);
}

GaussianEnvelope gaussian_envelope(double C, double kappa_center, double d) {
  if (!(C > 0.0)) throw TransportError("NonpositiveC: envelope needs C > 0");
  return GaussianEnvelope{C, kappa_center, d};
}

std::vector<double> envelope_weights(const DiabaticLine& line, double C,
                                     const ModelConfig& cfg) {
  const DerivedScales sc = derive_scales(cfg);
  const double kappa_c =
      0.5 * (line.kappa_samples.front() + line.kappa_samples.back());
  const GaussianEnvelope g = gaussian_envelope(C, kappa_c, sc.d);
  std::vector<double> w(line.kappa_samples.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = g(line.kappa_samples[j]);
    sum += w[j];
  }
  if (!(sum > 0.0)) throw TransportError("NonpositiveC: zero envelope mass");
  for (double& v : w) v /= sum;
  return w;
}

double assembly_kappa_span(double C, const ModelConfig& cfg) {
  if (!(C > 0.0)) throw TransportError("NonpositiveC: envelope needs C > 0");
  const DerivedScales sc = derive_scales(cfg);
  const double zone = 2.0 * M_PI / sc.d;
  if (C >= 0.5) return zone;
  /* four standard deviations of g on each side */
  const double sigma = zone / std::sqrt(2.0 * C);
  return std::max(zone, 8.0 * sigma);
}

TransportingState assemble(const DiabaticLine& line, double C,
                           const ModelConfig& cfg,
                           const AssembleOptions& opts) {
  if (!(C > 0.0)) throw TransportError("NonpositiveC: envelope needs C > 0");
  if (!cfg.dir.rational)
    throw TransportError(
        "IrrationalDirection: assembly needs a rational (r,q); use the (0,1) "
        "state as the cross-direction initial condition");
  if (line.kappa_samples.size() < 2)
    throw TransportError("LineLost: line too short to assemble");

  const DerivedScales sc = derive_scales(cfg);
  const int r = cfg.dir.r, q = cfg.dir.q;
  const std::size_t nk = line.kappa_samples.size();
  const double kappa_c =
      0.5 * (line.kappa_samples.front() + line.kappa_samples.back());
  const GaussianEnvelope g = gaussian_envelope(C, kappa_c, sc.d);

  /* trapezoid weights times envelope */
  std::vector<double> w(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    double dk;
    if (j == 0)
      dk = 0.5 * (line.kappa_samples[1] - line.kappa_samples[0]);
    else if (j + 1 == nk)
      dk = 0.5 * (line.kappa_samples[nk - 1] - line.kappa_samples[nk - 2]);
    else
      dk = 0.5 * (line.kappa_samples[j + 1] - line.kappa_samples[j - 1]);
    w[j] = g(line.kappa_samples[j]) * dk;
  }

  TransportingState state;
  state.C = C;
  state.gauge = Gauge::Rotated;
  state.slope = line.slope;
  state.kappa_center = kappa_c;

  std::vector<Cplx> amps;
  for (long l = -opts.l_half; l <= opts.l_half; ++l) {
    /* rungs p = r*l + q*m restricted to the line's window */
    long m_lo = long(std::floor((double(line.p_min) - double(r) * l) / q));
    long m_hi = long(std::ceil((double(line.p_max) - double(r) * l) / q));
    for (long m = m_lo; m <= m_hi; ++m) {
      const long p = long(r) * l + long(q) * m;
      if (p < line.p_min || p > line.p_max) continue;
      const long s = long(q) * l - long(r) * m;
      const Eigen::Index pi = Eigen::Index(p - line.p_min);
      Cplx a(0.0, 0.0);
      for (std::size_t j = 0; j < nk; ++j) {
        if (w[j] == 0.0) continue;
        a += w[j] * line.vectors(pi, Eigen::Index(j)) *
             std::polar(1.0, double(s) * sc.d * line.kappa_samples[j]);
      }
      if (std::norm(a) > 0.0) {
        state.sites.push_back(SiteIndex{l, m});
        amps.push_back(a);
      }
    }
  }
  if (amps.empty())
    throw TransportError("LineLost: assembly produced an empty state");
  state.amp.resize(Eigen::Index(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i)
    state.amp[Eigen::Index(i)] = amps[i];
  const double norm = state.amp.norm();
  if (!(norm > 1e-14))
    throw TransportError("LineLost: assembly produced zero mass");
  state.amp /= norm;
  return state;
}

WavePacket to_gauge(const TransportingState& state, Gauge target,
                    const ModelConfig& cfg) {
  const DerivedScales sc = derive_scales(cfg);
  const double beta = sc.Fy != 0.0 ? sc.Fx / sc.Fy : 0.0;
  long max_l = 1, max_mp = 1;
  for (const SiteIndex& site : state.sites) {
    max_l = std::max(max_l, std::labs(site.l));
    max_mp = std::max(max_mp, std::labs(site.m + std::lround(beta * site.l)));
  }
  const StripLattice strip =
      make_strip(cfg, int(max_l) + 2, int(max_mp) + 2);
  return to_gauge(state, target, cfg, strip);
}

WavePacket to_gauge(const TransportingState& state, Gauge target,
                    const ModelConfig& cfg, const StripLattice& strip) {
  WavePacket psi;
  psi.strip = strip;
  psi.gauge = target;
  psi.t = 0.0;
  psi.amp = Eigen::VectorXcd::Zero(strip.size());
  double kept = 0.0;
  for (std::size_t i = 0; i < state.sites.size(); ++i) {
    const SiteIndex site = state.sites[i];
    const long idx = strip.index_physical(site.l, site.m);
    if (idx < 0) continue;
    Cplx phase;
    try {
      phase = gauge_phase(state.gauge, target, site, cfg);
    } catch (const ConfigError& err) {
      throw TransportError(std::string("UnsupportedGaugePair: ") + err.what());
    }
    psi.amp[idx] = state.amp[Eigen::Index(i)] * phase;
    kept += std::norm(psi.amp[idx]);
  }
  if (1.0 - kept > 1e-9)
    throw TransportError("MassLost: strip drops " + std::to_string(1.0 - kept) +
                         " of the state");
  return psi;
}

WavePacket embed_packet(const WavePacket& psi, const StripLattice& strip) {
  WavePacket out;
  out.strip = strip;
  out.gauge = psi.gauge;
  out.t = psi.t;
  out.amp = Eigen::VectorXcd::Zero(strip.size());
  double kept = 0.0;
  for (long i = 0; i < psi.amp.size(); ++i) {
    if (psi.amp[i] == Cplx(0.0, 0.0)) continue;
    const SiteIndex site = psi.strip.physical(i);
    const long idx = strip.index_physical(site.l, site.m);
    if (idx < 0) continue;
    out.amp[idx] = psi.amp[i];
    kept += std::norm(psi.amp[i]);
  }
  const double total = psi.amp.squaredNorm();
  if (total - kept > 1e-9)
    throw TransportError("MassLost: target strip drops " +
                         std::to_string(total - kept) + " of the packet");
  return out;
}

}  // namespace cyclobloch
