#include "cyclobloch/run.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "cyclobloch/classical.hpp"
#include "cyclobloch/fiber.hpp"
#include "cyclobloch/io.hpp"
#include "cyclobloch/observables.hpp"
#include "cyclobloch/perturbation.hpp"
#include "cyclobloch/propagate.hpp"
#include "cyclobloch/strip.hpp"
#include "cyclobloch/transport.hpp"

namespace cyclobloch {

namespace {

namespace fs = std::filesystem;

constexpr double kLeakTolerance = 1e-10;

std::string trim(std::string s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size())
      throw SpecError("TypeError: key '" + key + "' got '" + value + "'");
    return v;
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception&) {
    throw SpecError("TypeError: key '" + key + "' got '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v))
    throw SpecError("TypeError: key '" + key + "' needs an integer, got '" +
                    value + "'");
  return long(v);
}

std::vector<double> parse_grid(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t pos = value.find(',', start);
    if (pos == std::string::npos) pos = value.size();
    const std::string tok = trim(value.substr(start, pos - start));
    if (!tok.empty()) out.push_back(parse_double(key, tok));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> base_meta(const ExperimentSpec& spec) {
  std::vector<std::string> meta = config_header(spec.config);
  meta.insert(meta.begin(), "subcommand=" + to_string(spec.subcommand));
  meta.push_back("seed=" + std::to_string(spec.seed));
  return meta;
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

/* ---- transporting-state construction (shared by three subcommands) ---- */

struct BuiltState {
  WavePacket packet;  // LandauY
  DiabaticLine line;
  ModelConfig construction_cfg;
};

BuiltState build_transport_packet(const ModelConfig& cfg,
                                  const RunParams& params, bool force_01) {
  ModelConfig cfg0 = cfg;
  if (force_01 || !cfg.dir.rational) {
    cfg0.dir = Direction::make_rational(0, 1);
    cfg0 = validate(cfg0);
  }
  const DerivedScales sc0 = derive_scales(cfg0);
  if (!(cfg0.F > 0.0))
    throw SpecError("MissingRequired: transporting states need F > 0");

  const double span = assembly_kappa_span(params.C, cfg0);
  const double climb = span * std::abs(sc0.v_star) / (sc0.d * cfg0.F);
  const long p_half = long(std::ceil(0.5 * climb)) + params.window;
  const double kappa_c = params.kappa0;

  int band = params.band;
  double kappa_seed = kappa_c;
  Eigen::VectorXcd seed_vec;
  if (band < 0) {
    /* automatic detection on a coarse one-zone spectrum */
    const double half_zone = M_PI / sc0.d_tilde;
    SpectrumOptions opt;
    opt.p_min = -p_half;
    opt.p_max = p_half;
    opt.keep_vectors = true;
    const int coarse_points = std::max(33, params.kappa_points / 4);
    const SpectrumResult coarse = band_structure(
        cfg0,
        uniform_kappa_grid(kappa_c - half_zone, kappa_c + half_zone,
                           coarse_points),
        opt);
    const DiabaticLine probe = auto_follow(coarse, cfg0);
    const std::size_t j_mid = probe.kappa_samples.size() / 2;
    kappa_seed = probe.kappa_samples[j_mid];
    seed_vec = probe.vectors.col(Eigen::Index(j_mid));
    /* map the probe vector onto a full-fiber band index */
    const FiberOperator op =
        build_fiber_rotated_frame(kappa_seed, cfg0, -p_half, p_half);
    const FiberSolution sol = solve_fiber(op, true);
    const Eigen::VectorXcd ov = sol.vectors.adjoint() * seed_vec;
    double best = -1.0;
    for (Eigen::Index j = 0; j < ov.size(); ++j)
      if (std::abs(ov[j]) > best) {
        best = std::abs(ov[j]);
        band = int(j);
      }
  }

  const int n_zones = std::max(1, int(std::lround(span / (2.0 * M_PI / sc0.d))));
  const int points = params.kappa_points * n_zones;
  const std::vector<double> grid =
      uniform_kappa_grid(kappa_c - 0.5 * span, kappa_c + 0.5 * span, points);
  BuiltState built;
  built.construction_cfg = cfg0;
  built.line =
      follow_line_scan(cfg0, grid, kappa_seed, band, -p_half, p_half);
  const TransportingState state = assemble(built.line, params.C, cfg0);
  built.packet = to_gauge(state, Gauge::LandauY, cfg0);
  return built;
}

/* ---- strip sizing ---- */

StripLattice auto_strip(const ModelConfig& cfg, const RunParams& params,
                        double t_end, double support_l) {
  int L = params.strip_L;
  if (L <= 0) {
    const DerivedScales sc = derive_scales(cfg);
    const double hop_speed = std::max(cfg.Jx, cfg.Jy) / std::sqrt(2.0);
    /* past the critical field packets stop drifting at v* */
    const double a_max = (sc.F_cr > 0.0 && cfg.F > sc.F_cr)
                             ? hop_speed
                             : std::max(std::abs(sc.v_star), hop_speed);
    L = int(std::ceil(1.5 * (a_max * t_end + support_l)));
    L = std::clamp(L, 16, 255);
  }
  return make_strip(cfg, L, params.strip_W);
}

/* ---- evolution plumbing shared by evolve / classify / scan-A ---- */

struct EvolutionOutput {
  ObservableSeries series;
  EtaProfile profile;
  WavePacket final_state;  // empty for ensembles
  bool have_final = false;
  double max_leak = 0.0;
  double max_norm_drift = 0.0;
  double step_used = 0.0;
};

double resolve_step(const ModelConfig& cfg, const RunParams& params) {
  if (params.dt > 0.0) return params.dt;
  if (params.scheme == "td") {
    const DerivedScales sc = derive_scales(cfg);
    const double rate = std::max(
        {sc.omega_x, sc.omega_y, std::abs(cfg.Jx), std::abs(cfg.Jy), 1e-9});
    return 0.04 / rate;
  }
  return std::clamp(params.record_dt, 0.25, 1.0);
}

EvolveScheme resolve_scheme(const RunParams& params) {
  if (params.scheme == "td") return EvolveScheme::TdGauge;
  if (params.scheme == "static") return EvolveScheme::StaticGauge;
  throw SpecError("TypeError: scheme must be 'static' or 'td'");
}

EvolutionOutput run_single(const WavePacket& psi0, const ModelConfig& cfg,
                           const RunParams& params, double step) {
  EvolveOptions opts;
  opts.record_dt = params.record_dt;
  const EvolveResult res =
      resolve_scheme(params) == EvolveScheme::TdGauge
          ? evolve_td_gauge(psi0, params.t_end, step, cfg, opts)
          : evolve_static_gauge(psi0, params.t_end, step, cfg, 1e-14, opts);
  EvolutionOutput out;
  out.series = res.series;
  out.final_state = res.final_state;
  out.have_final = true;
  out.profile = project_eta(res.final_state, cfg);
  out.max_norm_drift = res.max_norm_drift;
  for (double lk : res.series.leak) out.max_leak = std::max(out.max_leak, lk);
  out.step_used = step;
  return out;
}

EvolutionOutput run_evolution(const ExperimentSpec& spec,
                              const ModelConfig& cfg,
                              std::vector<std::string>* meta) {
  const RunParams& params = spec.params;
  const double step = resolve_step(cfg, params);

  WavePacket psi0;
  double support_l = 3.0 / std::sqrt(2.0 * params.Cx);
  BuiltState built;
  bool from_transport = false;
  if (params.init == "transport") {
    built = build_transport_packet(cfg, params, true);
    support_l = double(built.packet.strip.L_half);
    from_transport = true;
  } else if (params.init == "file") {
    psi0 = read_packet(params.init_state);
    psi0 = convert_gauge(psi0, Gauge::LandauY, cfg);
    support_l = double(psi0.strip.L_half);
  }

  const StripLattice strip = auto_strip(cfg, params, params.t_end, support_l);
  meta->push_back("strip_L_half=" + std::to_string(strip.L_half));
  meta->push_back("strip_W_half=" + std::to_string(strip.W_half));
  meta->push_back("scheme=" + params.scheme);
  meta->push_back("step=" + format_double(step));
  meta->push_back("t_end=" + format_double(params.t_end));
  meta->push_back("init=" + params.init);

  if (params.init == "random-gaussian" && params.seeds > 1) {
    meta->push_back("realizations=" + std::to_string(params.seeds));
    const EnsembleResult ens = ensemble_evolve(
        strip, params.Cx, params.Cy, params.seeds, spec.seed,
        resolve_scheme(params), params.t_end, step, cfg, 1e-14, {});
    EvolutionOutput out;
    out.series = ens.mean;
    out.profile = ens.final_profile;
    out.max_leak = ens.max_leak;
    out.max_norm_drift = ens.max_norm_drift;
    out.step_used = step;
    return out;
  }

  if (from_transport)
    psi0 = embed_packet(built.packet, strip);
  else if (params.init == "file")
    psi0 = embed_packet(psi0, strip);
  else if (params.init == "gaussian")
    psi0 = gaussian_packet(strip, params.Cx, params.Cy, false, spec.seed, 0);
  else if (params.init == "random-gaussian")
    psi0 = gaussian_packet(strip, params.Cx, params.Cy, true, spec.seed, 0);
  else
    throw SpecError("TypeError: unknown init '" + params.init + "'");
  return run_single(psi0, cfg, params, step);
}

void enforce_run_validity(const EvolutionOutput& out) {
  if (out.max_leak > kLeakTolerance)
    throw PropagatorError("BoundaryLeak: " + format_double(out.max_leak) +
                          " exceeds " + format_double(kLeakTolerance) +
                          " (enlarge the strip or shorten t_end)");
}

/* ---- subcommands ---- */

void run_spectrum(const ExperimentSpec& spec, const std::string& dir) {
  const ModelConfig& cfg = spec.config;
  const DerivedScales sc = derive_scales(cfg);
  double lo = spec.params.kappa_lo, hi = spec.params.kappa_hi;
  if (lo == hi) {
    lo = -M_PI / sc.d_tilde;
    hi = M_PI / sc.d_tilde;
  }
  SpectrumOptions opt;
  opt.p_min = -spec.params.window;
  opt.p_max = spec.params.window;
  const SpectrumResult result = band_structure(
      cfg, uniform_kappa_grid(lo, hi, spec.params.kappa_points), opt);
  std::vector<std::string> meta = base_meta(spec);
  meta.push_back("kappa_points=" + std::to_string(spec.params.kappa_points));
  write_text_atomic(out_path(dir, "spectrum.csv"),
                    serialize_spectrum(result, meta));
}

void run_phase_portrait(const ExperimentSpec& spec, const std::string& dir) {
  const ModelConfig& cfg = spec.config;
  const int n_traj = std::max(1, spec.params.seeds);
  const std::vector<std::pair<double, double>> seeds =
      default_portrait_seeds(n_traj);
  std::string rows;
  for (int i = 0; i < n_traj; ++i) {
    const ClassicalState s0{seeds[std::size_t(i)].first,
                            seeds[std::size_t(i)].second, 0.0};
    const std::vector<std::pair<double, double>> orbit =
        stroboscopic_map(s0, spec.params.periods, cfg, IntegratorScheme::RK4);
    for (std::size_t j = 0; j < orbit.size(); ++j)
      rows += std::to_string(i) + "," + std::to_string(j) + "," +
              format_double(orbit[j].first) + "," +
              format_double(orbit[j].second) + "\n";
  }
  const double fraction = island_scan(cfg, seeds, spec.params.periods);

  /* conserved-quantity drift diagnostic on the first seed */
  const ClassicalState probe_seed{seeds.front().first, seeds.front().second,
                                  0.0};
  const TrajectoryRecord probe =
      integrate(probe_seed, 100.0, 1e-3, cfg, IntegratorScheme::RK4, 100);

  std::vector<std::string> meta = base_meta(spec);
  meta.push_back("trajectories=" + std::to_string(n_traj));
  meta.push_back("periods=" + std::to_string(spec.params.periods));
  meta.push_back("island_fraction=" + format_double(fraction));
  meta.push_back("invariant_drift=" + format_double(probe.max_drift));
  write_text_atomic(out_path(dir, "portrait.csv"),
                    compose_csv(meta, "trajectory,period,Y,P", rows));
}

void run_transport_state(const ExperimentSpec& spec, const std::string& dir) {
  const BuiltState built =
      build_transport_packet(spec.config, spec.params, false);
  std::vector<std::string> meta = base_meta(spec);
  meta.push_back("C=" + format_double(spec.params.C));
  if (built.construction_cfg.dir.rational &&
      (!spec.config.dir.rational ||
       built.construction_cfg.dir.r != spec.config.dir.r ||
       built.construction_cfg.dir.q != spec.config.dir.q)) {
    meta.push_back("construction_r=" +
                   std::to_string(built.construction_cfg.dir.r));
    meta.push_back("construction_q=" +
                   std::to_string(built.construction_cfg.dir.q));
  }
  write_text_atomic(out_path(dir, "line.csv"),
                    serialize_line(built.line, meta));

  WavePacket packet = built.packet;
  if (spec.config.gauge != Gauge::LandauY)
    packet = convert_gauge(packet, spec.config.gauge, spec.config);
  write_text_atomic(out_path(dir, "transport_state.csv"),
                    serialize_packet(packet, meta));
}

void run_evolve(const ExperimentSpec& spec, const std::string& dir,
                bool classify) {
  std::vector<std::string> meta = base_meta(spec);
  const EvolutionOutput out = run_evolution(spec, spec.config, &meta);
  write_text_atomic(out_path(dir, "series.csv"),
                    serialize_series(out.series, meta));
  write_text_atomic(out_path(dir, "profile.csv"),
                    serialize_profile(out.profile, meta));
  if (out.have_final)
    write_text_atomic(out_path(dir, "final_state.csv"),
                      serialize_packet(out.final_state, meta));

  if (classify) {
    const Classification cls = classify_regime(out.series, spec.config);
    std::string text;
    for (const std::string& line : meta) text += "# " + line + "\n";
    text += "regime=" + to_string(cls.regime) + "\n";
    text += "score_transporting=" + format_double(cls.score_transporting) + "\n";
    text += "score_ballistic=" + format_double(cls.score_ballistic) + "\n";
    text += "score_localized=" + format_double(cls.score_localized) + "\n";
    text += "score_oscillating=" + format_double(cls.score_oscillating) + "\n";
    text += "transient=" + format_double(transient_estimate(out.series)) + "\n";
    write_text_atomic(out_path(dir, "classification.txt"), text);
  }
  enforce_run_validity(out);
}

void run_scan_A(const ExperimentSpec& spec, const std::string& dir) {
  std::vector<std::pair<double, double>> points;
  std::string rows;
  double worst_leak = 0.0;
  for (std::size_t i = 0; i < spec.params.F_grid.size(); ++i) {
    ModelConfig cfgF = spec.config;
    cfgF.F = spec.params.F_grid[i];
    cfgF = validate(cfgF);
    std::vector<std::string> meta = base_meta(spec);
    meta.push_back("F_point=" + format_double(cfgF.F));
    ExperimentSpec point = spec;
    point.config = cfgF;
    point.params.init = "random-gaussian";
    const EvolutionOutput out = run_evolution(point, cfgF, &meta);
    worst_leak = std::max(worst_leak, out.max_leak);
    write_text_atomic(out_path(dir, "scan_" + std::to_string(i) + ".csv"),
                      serialize_series(out.series, meta));

    const auto window = default_fit_window(out.series, kLeakTolerance);
    const FitResult fit =
        ballistic_fit(out.series, window.first, window.second);
    points.push_back({cfgF.F, fit.coefficient});
    rows += format_double(cfgF.F) + "," + format_double(fit.coefficient) +
            "," + format_double(fit.residual) + "," +
            format_double(transient_estimate(out.series)) + "\n";
  }
  std::vector<std::string> meta = base_meta(spec);
  meta.push_back("realizations=" + std::to_string(spec.params.seeds));
  std::string summary;
  const FitResult scaling = scaling_fit(points);
  summary = serialize_fit(scaling, "A_of_F_power_law");
  meta.push_back("scaling_exponent=" + format_double(scaling.exponent));
  write_text_atomic(out_path(dir, "scan_A.csv"),
                    compose_csv(meta, "F,A,fit_residual,transient", rows));
  write_text_atomic(out_path(dir, "scan_summary.txt"), summary);
  if (worst_leak > kLeakTolerance)
    throw PropagatorError("BoundaryLeak: " + format_double(worst_leak) +
                          " exceeds " + format_double(kLeakTolerance));
}

void run_perturb(const ExperimentSpec& spec, const std::string& dir) {
  const ModelConfig& cfg = spec.config;
  const DerivedScales sc = derive_scales(cfg);
  const PerturbativeBand band = perturbative_band(spec.params.nu, cfg);

  std::vector<std::string> meta = base_meta(spec);
  meta.push_back("nu=" + std::to_string(spec.params.nu));
  meta.push_back("order=" + std::to_string(band.order));
  meta.push_back("prefactor=" + format_double(band.prefactor));
  meta.push_back("exponent=" + format_double(double(band.exponent)));
  meta.push_back("strong_field=" +
                 std::string(strong_field_ok(cfg) ? "yes" : "no"));

  const bool is01 = cfg.dir.rational && cfg.dir.r == 0 && cfg.dir.q == 1;
  const bool is11 = cfg.dir.rational && cfg.dir.r == 1 && cfg.dir.q == 1;
  std::string rows;
  if (is01 || is11) {
    const std::vector<double> grid = uniform_kappa_grid(
        -M_PI / sc.d_tilde, M_PI / sc.d_tilde, spec.params.kappa_points);
    const long p_half = spec.params.window + std::labs(spec.params.nu);
    for (double kappa : grid) {
      const double e_pert =
          is01 ? first_order_01(spec.params.nu, kappa, cfg).E
               : band.E0 + second_order_11(spec.params.nu, kappa, cfg);
      const FiberOperator op = build_fiber_rotated_frame(
          kappa, cfg, spec.params.nu - p_half, spec.params.nu + p_half);
      const FiberSolution sol = solve_fiber(op, false);
      double e_exact = sol.energies[0];
      for (Eigen::Index j = 1; j < sol.energies.size(); ++j)
        if (std::abs(sol.energies[j] - band.E0) <
            std::abs(e_exact - band.E0))
          e_exact = sol.energies[j];
      rows += format_double(kappa) + "," + format_double(e_pert) + "," +
              format_double(e_exact) + "\n";
    }
  }
  write_text_atomic(out_path(dir, "perturb.csv"),
                    compose_csv(meta, "kappa,e_perturbative,e_exact", rows));
}

}  // namespace

Subcommand subcommand_from_string(const std::string& name) {
  if (name == "spectrum") return Subcommand::Spectrum;
  if (name == "phase-portrait") return Subcommand::PhasePortrait;
  if (name == "transport-state") return Subcommand::TransportState;
  if (name == "evolve") return Subcommand::Evolve;
  if (name == "scan-A") return Subcommand::ScanA;
  if (name == "perturb") return Subcommand::Perturb;
  if (name == "classify") return Subcommand::Classify;
  throw SpecError("UnknownSubcommand: '" + name + "'");
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Spectrum: return "spectrum";
    case Subcommand::PhasePortrait: return "phase-portrait";
    case Subcommand::TransportState: return "transport-state";
    case Subcommand::Evolve: return "evolve";
    case Subcommand::ScanA: return "scan-A";
    case Subcommand::Perturb: return "perturb";
    case Subcommand::Classify: return "classify";
  }
  return "spectrum";
}

ExperimentSpec parse_config(const std::string& text,
                            const std::string& subcommand) {
  ExperimentSpec spec;
  spec.subcommand = subcommand_from_string(subcommand);
  ModelConfig& cfg = spec.config;
  RunParams& p = spec.params;

  bool saw_F = false, saw_r = false, saw_q = false, saw_beta = false;
  int r = 0, q = 1;
  double beta = 0.0;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError("TypeError: expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "F") {
      cfg.F = parse_double(key, value);
      saw_F = true;
    } else if (key == "alpha") {
      cfg.alpha = parse_double(key, value);
    } else if (key == "Jx") {
      cfg.Jx = parse_double(key, value);
    } else if (key == "Jy") {
      cfg.Jy = parse_double(key, value);
    } else if (key == "r") {
      r = int(parse_long(key, value));
      saw_r = true;
    } else if (key == "q") {
      q = int(parse_long(key, value));
      saw_q = true;
    } else if (key == "beta") {
      beta = parse_double(key, value);
      saw_beta = true;
    } else if (key == "gauge") {
      try {
        cfg.gauge = gauge_from_string(value);
      } catch (const std::exception&) {
        throw SpecError("TypeError: unknown gauge '" + value + "'");
      }
    } else if (key == "kappa_points") {
      p.kappa_points = int(parse_long(key, value));
    } else if (key == "kappa_lo") {
      p.kappa_lo = parse_double(key, value);
    } else if (key == "kappa_hi") {
      p.kappa_hi = parse_double(key, value);
    } else if (key == "kappa0") {
      p.kappa0 = parse_double(key, value);
    } else if (key == "band") {
      p.band = int(parse_long(key, value));
    } else if (key == "window") {
      p.window = parse_long(key, value);
    } else if (key == "t_end") {
      p.t_end = parse_double(key, value);
    } else if (key == "dt") {
      p.dt = parse_double(key, value);
    } else if (key == "record_dt") {
      p.record_dt = parse_double(key, value);
    } else if (key == "seeds") {
      p.seeds = int(parse_long(key, value));
    } else if (key == "C") {
      p.C = parse_double(key, value);
    } else if (key == "Cx") {
      p.Cx = parse_double(key, value);
    } else if (key == "Cy") {
      p.Cy = parse_double(key, value);
    } else if (key == "strip_L") {
      p.strip_L = int(parse_long(key, value));
    } else if (key == "strip_W") {
      p.strip_W = int(parse_long(key, value));
    } else if (key == "scheme") {
      p.scheme = value;
    } else if (key == "init") {
      p.init = value;
    } else if (key == "init_state") {
      p.init_state = value;
    } else if (key == "F_grid") {
      p.F_grid = parse_grid(key, value);
    } else if (key == "periods") {
      p.periods = int(parse_long(key, value));
    } else if (key == "nu") {
      p.nu = parse_long(key, value);
    } else {
      throw SpecError("UnknownKey: '" + key + "'");
    }
  }

  if (saw_beta && (saw_r || saw_q))
    throw SpecError(
        "TypeError: direction given both as rational (r,q) and as beta");
  if (saw_beta)
    cfg.dir = Direction::make_irrational(beta);
  else
    cfg.dir = Direction::make_rational(r, q);
  cfg = validate(cfg);

  /* basic sanity */
  if (p.kappa_points < 2)
    throw SpecError("TypeError: kappa_points must be >= 2");
  if (p.seeds < 1) throw SpecError("TypeError: seeds must be >= 1");
  if (!(p.t_end > 0.0)) throw SpecError("TypeError: t_end must be > 0");
  if (p.window < 2) throw SpecError("TypeError: window must be >= 2");
  if (p.scheme != "static" && p.scheme != "td")
    throw SpecError("TypeError: scheme must be 'static' or 'td'");
  if (p.init != "gaussian" && p.init != "random-gaussian" &&
      p.init != "transport" && p.init != "file")
    throw SpecError("TypeError: unknown init '" + p.init + "'");

  /* per-subcommand requirements */
  switch (spec.subcommand) {
    case Subcommand::ScanA:
      if (p.F_grid.empty())
        throw SpecError("MissingRequired: scan-A needs F_grid");
      for (double F : p.F_grid)
        if (!(F > 0.0))
          throw SpecError("TypeError: F_grid entries must be > 0");
      break;
    case Subcommand::Spectrum:
    case Subcommand::TransportState:
    case Subcommand::Perturb:
    case Subcommand::PhasePortrait:
      if (!saw_F || !(cfg.F > 0.0))
        throw SpecError("MissingRequired: this subcommand needs F > 0");
      break;
    case Subcommand::Evolve:
    case Subcommand::Classify:
      if (!saw_F)
        throw SpecError("MissingRequired: evolve/classify need F (0 allowed)");
      if (p.init == "file" && p.init_state.empty())
        throw SpecError("MissingRequired: init=file needs init_state");
      break;
  }
  return spec;
}

void run(const ExperimentSpec& spec, const std::string& out_dir, int threads) {
  if (threads > 0) Eigen::setNbThreads(threads);
  fs::create_directories(out_dir);
  switch (spec.subcommand) {
    case Subcommand::Spectrum: run_spectrum(spec, out_dir); break;
    case Subcommand::PhasePortrait: run_phase_portrait(spec, out_dir); break;
    case Subcommand::TransportState: run_transport_state(spec, out_dir); break;
    case Subcommand::Evolve: run_evolve(spec, out_dir, false); break;
    case Subcommand::ScanA: run_scan_A(spec, out_dir); break;
    case Subcommand::Perturb: run_perturb(spec, out_dir); break;
    case Subcommand::Classify: run_evolve(spec, out_dir, true); break;
  }
}

}  // namespace cyclobloch
