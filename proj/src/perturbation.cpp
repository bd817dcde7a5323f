#include "cyclobloch/perturbation.hpp"

#include <cmath>
#include <sstream>

namespace cyclobloch {

namespace {

void require_direction(const ModelConfig& cfg, int r, int q,
                       const char* where) {
  validate(cfg);
  if (!cfg.dir.rational || cfg.dir.r != r || cfg.dir.q != q) {
    std::ostringstream os;
    os << "WrongDirection: " << where << " applies to (r,q)=(" << r << ","
       << q << ") only";
    throw PerturbationError(os.str());
  }
}

}  // namespace

bool strong_field_ok(const ModelConfig& cfg) {
  return cfg.F > 5.0 * std::max(cfg.Jx, cfg.Jy);
}

FirstOrderState first_order_01(long nu, double kappa, const ModelConfig& cfg) {
  require_direction(cfg, 0, 1, "first_order_01");
  FirstOrderState st;
  st.strong_field = strong_field_ok(cfg);
  // Diagonal of the reduced chain at rung nu; the admixture amplitude is
  // (-Jy/2)/(E_nu - E_nu+-1) = +-Jy/(2F).
  st.E = cfg.F * double(nu) -
         cfg.Jx * std::cos(2.0 * M_PI * cfg.alpha * double(nu) - kappa);
  const double eps = cfg.Jy / (2.0 * cfg.F);
  st.b = {{nu - 1, -eps}, {nu, 1.0}, {nu + 1, eps}};
  return st;
}

double second_order_11(long nu, double kappa, const ModelConfig& cfg) {
  require_direction(cfg, 1, 1, "second_order_11");
  const DerivedScales sc = derive_scales(cfg);
  const double edF = sc.d * cfg.F;
  const double a0 = 2.0 * M_PI * cfg.alpha * double(nu - 1) - 2.0 * sc.d * kappa;
  const double a1 = 2.0 * M_PI * cfg.alpha * double(nu) - 2.0 * sc.d * kappa;
  return cfg.Jx * cfg.Jy / (2.0 * edF) * (std::cos(a0) - std::cos(a1));
}

double leading_prefactor(int r, int q, double F, double Jx, double Jy) {
  return std::pow(-Jx, q) * std::pow(-Jy, r) /
         (std::pow(2.0, q + r) * std::pow(F, q + r - 1));
}

std::pair<int, int> scaling_exponents(int r, int q) {
  return {1 - q - r, q + r - 1};
}

PerturbativeBand perturbative_band(long nu, const ModelConfig& cfg) {
  validate(cfg);
  if (!cfg.dir.rational)
    throw PerturbationError(
        "WrongDirection: perturbative_band needs a rational direction");
  const DerivedScales sc = derive_scales(cfg);
  PerturbativeBand band;
  band.nu = nu;
  band.order = cfg.dir.r + cfg.dir.q;
  band.exponent = cfg.dir.q + cfg.dir.r - 1;
  band.prefactor =
      leading_prefactor(cfg.dir.r, cfg.dir.q, cfg.F, cfg.Jx, cfg.Jy);
  band.E0 = sc.d * cfg.F * double(nu);
  return band;
}

}  // namespace cyclobloch
