#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "cyclobloch/model.hpp"

namespace cyclobloch {

struct PerturbationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/* Leading-order band data for a Stark rung nu in the strong-field limit. */
struct PerturbativeBand {
  long nu = 0;
  int order = 0;        // leading nonvanishing perturbation order, r+q
  double prefactor = 0; // Lambda_{r,q}(F), signed
  int exponent = 0;     // q+r-1: band width shrinks as F^{-(q+r-1)}
  double E0 = 0;        // unperturbed Stark energy d*F*nu
};

struct FirstOrderState {
  double E = 0;
  std::vector<std::pair<long, double>> b;  // sparse (rung, amplitude)
  bool strong_field = true;                // F > 5*max(Jx, Jy) held
};

/* True when the strong-field expansion is trustworthy (F > 5*max(Jx,Jy)). */
bool strong_field_ok(const ModelConfig& cfg);

/* (0,1) first-order band: E = F*nu - Jx*cos(2*pi*alpha*nu - kappa), the
 * diagonal of the reduced chain, with admixture -+Jy/(2F) on nu-+1. */
FirstOrderState first_order_01(long nu, double kappa, const ModelConfig& cfg);

/* (1,1) second-order shift away from the flat ladder E0 = d*F*nu. */
double second_order_11(long nu, double kappa, const ModelConfig& cfg);

/* Common factor of every leading-order path term, (r,q) arbitrary coprime
 * with q >= r >= 1: (-Jx)^q (-Jy)^r / (2^{q+r} F^{q+r-1}). */
double leading_prefactor(int r, int q, double F, double Jx, double Jy);

/* (width_exponent, transient_exponent) = (1-q-r, q+r-1). */
std::pair<int, int> scaling_exponents(int r, int q);

PerturbativeBand perturbative_band(long nu, const ModelConfig& cfg);

}  // namespace cyclobloch
