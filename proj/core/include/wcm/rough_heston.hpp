#pragma once

#include <complex>
#include <vector>

#include "wcm/heston.hpp"

namespace wcm {

/// Rough Heston: the variance equation uses the kernel (t - s)^{alpha - 1} / Gamma(alpha).
/// alpha = 1 is classical Heston.
struct RoughHestonParams {
  HestonParams heston;
  double alpha = 1.0;
  int steps_per_unit = 500;  // Riccati grid resolution

  void validate() const;
};

/// R(w, psi) = (w^2 - w) / 2 + (rho eps w - kappa) psi + eps^2 psi^2 / 2 with w = i u.
std::complex<double> rough_riccati_rhs(std::complex<double> w, std::complex<double> psi, const HestonParams& p) noexcept;

/// Solves the Caputo equation D^alpha psi = R(i u, psi), psi(0) = 0, on the uniform grid
/// t_k = k t / n_steps with the fractional Adams predictor-corrector. Returns n_steps + 1 values.
/// Throws NumericError when |psi| exceeds 1e8 (explosion).
std::vector<std::complex<double>> rough_riccati_solve(std::complex<double> u, const RoughHestonParams& rp, double t,
                                                      int n_steps);

/// exp(i u (log S_0 + (r - q) t) + kappa vbar int_0^t psi + V_0 int_0^t R(i u, psi)), with both
/// integrals by the trapezoidal rule on a grid of max(100, ceil(t * steps_per_unit)) steps.
std::complex<double> rough_heston_cf(std::complex<double> u, double t, const RoughHestonParams& rp);

}  // namespace wcm
