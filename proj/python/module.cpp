#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cyclobloch/classical.hpp"
#include "cyclobloch/fiber.hpp"
#include "cyclobloch/io.hpp"
#include "cyclobloch/observables.hpp"
#include "cyclobloch/perturbation.hpp"
#include "cyclobloch/propagate.hpp"
#include "cyclobloch/run.hpp"
#include "cyclobloch/strip.hpp"
#include "cyclobloch/transport.hpp"

namespace py = pybind11;
using namespace cyclobloch;

namespace {

ModelConfig make_model(double Jx, double Jy, double alpha, double F, int r,
                       int q, std::optional<double> beta,
                       const std::string& gauge) {
  ModelConfig cfg;
  cfg.Jx = Jx;
  cfg.Jy = Jy;
  cfg.alpha = alpha;
  cfg.F = F;
  cfg.dir = beta ? Direction::make_irrational(*beta)
                 : Direction::make_rational(r, q);
  cfg.gauge = gauge_from_string(gauge);
  return validate(cfg);
}

py::dict scales_dict(const ModelConfig& cfg) {
  const DerivedScales sc = derive_scales(cfg);
  py::dict d;
  d["Fx"] = sc.Fx;
  d["Fy"] = sc.Fy;
  d["N"] = sc.N;
  d["d"] = sc.d;
  d["d_tilde"] = sc.d_tilde;
  d["theta"] = sc.theta;
  d["F_cr"] = sc.F_cr;
  d["v_star"] = sc.v_star;
  return d;
}

py::dict series_dict(const ObservableSeries& s) {
  py::dict d;
  d["t"] = s.times;
  d["x_mean"] = s.x_mean;
  d["y_mean"] = s.y_mean;
  d["sigma"] = s.sigma;
  d["m2_eta"] = s.m2_eta;
  d["m2_xi"] = s.m2_xi;
  d["leak"] = s.leak;
  d["norm"] = s.norm;
  return d;
}

py::dict band_structure_py(const ModelConfig& cfg, double kappa_lo,
                           double kappa_hi, int points, long window) {
  SpectrumOptions opt;
  opt.p_min = -window;
  opt.p_max = window;
  const SpectrumResult res = band_structure(
      cfg, uniform_kappa_grid(kappa_lo, kappa_hi, points), opt);
  py::dict d;
  d["kappa"] = res.kappa_grid;
  d["energies"] = res.energies;
  return d;
}

py::dict evolve_gaussian_py(const ModelConfig& cfg, double t_end, int L_half,
                            int W_half, double C_x, double C_y,
                            const std::string& scheme, double step,
                            double record_dt, bool incoherent,
                            std::uint64_t seed) {
  const StripLattice strip = make_strip(cfg, L_half, W_half);
  const WavePacket psi0 =
      gaussian_packet(strip, C_x, C_y, incoherent, seed, 0);
  EvolveOptions opts;
  opts.record_dt = record_dt;
  const EvolveResult res =
      scheme == "td"
          ? evolve_td_gauge(psi0, t_end, step, cfg, opts)
          : evolve_static_gauge(psi0, t_end, step, cfg, 1e-14, opts);
  py::dict d = series_dict(res.series);
  d["max_norm_drift"] = res.max_norm_drift;
  d["final_amp"] = res.final_state.amp;
  return d;
}

void run_experiment(const std::string& subcommand,
                    const std::string& config_text, const std::string& out_dir,
                    std::uint64_t seed, int threads) {
  ExperimentSpec spec = parse_config(config_text, subcommand);
  spec.seed = seed;
  run(spec, out_dir, threads);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Spectra, transporting states and wave-packet dynamics of a charged "
      "particle on a square lattice in crossed electric and magnetic fields";

  py::class_<ModelConfig>(m, "Model")
      .def(py::init(&make_model), py::kw_only(), py::arg("Jx") = 1.0,
           py::arg("Jy") = 1.0, py::arg("alpha") = 0.1, py::arg("F") = 0.0,
           py::arg("r") = 0, py::arg("q") = 1,
           py::arg("beta") = std::nullopt, py::arg("gauge") = "landau_y")
      .def_readonly("Jx", &ModelConfig::Jx)
      .def_readonly("Jy", &ModelConfig::Jy)
      .def_readonly("alpha", &ModelConfig::alpha)
      .def_readonly("F", &ModelConfig::F)
      .def("scales", &scales_dict);

  py::class_<CrossValidateOptions>(m, "CrossValidateOptions").def(py::init<>());

  m.def("band_structure", &band_structure_py, py::arg("model"),
        py::arg("kappa_lo"), py::arg("kappa_hi"), py::arg("points") = 128,
        py::arg("window") = 40,
        "Fiber spectrum E_nu(kappa); returns kappa grid and the per-kappa "
        "retained energies");
  m.def("cross_validate", &cross_validate_methods, py::arg("model"),
        py::arg("options") = CrossValidateOptions{},
        "Max deviation between the frame-fiber and rotated-basis spectra");
  m.def("evolve_gaussian", &evolve_gaussian_py, py::arg("model"),
        py::arg("t_end"), py::arg("L_half") = 32, py::arg("W_half") = 32,
        py::arg("C_x") = 0.5, py::arg("C_y") = 0.5,
        py::arg("scheme") = "static", py::arg("step") = 0.5,
        py::arg("record_dt") = 0.5, py::arg("incoherent") = false,
        py::arg("seed") = 12345,
        "Propagate a Gaussian packet and return the moment series");
  m.def("run_experiment", &run_experiment, py::arg("subcommand"),
        py::arg("config_text"), py::arg("out_dir"), py::arg("seed") = 12345,
        py::arg("threads") = 1,
        "Full experiment dispatch; writes CSV outputs into out_dir");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<SpecError>(m, "SpecError");
}
