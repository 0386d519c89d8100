#pragma once

#include <complex>
#include <span>

#include "wcm/model.hpp"
#include "wcm/rng.hpp"

namespace wcm {

/// dS/S = (r - q) dt + sqrt(V) dW, dV = kappa (vbar - V) dt + eps sqrt(V) dB, d<W, B> = rho dt.
struct HestonParams {
  double s0 = 100.0;
  double kappa = 1.5;
  double vbar = 0.04;
  double eps = 0.5;
  double rho = -0.7;
  double v0 = 0.04;
  double rate = 0.0;
  double dividend = 0.0;

  void validate() const;
};

struct MomentCondition {
  double delta2 = 0.0;  // (2 rho eps - kappa)^2 - 2 eps^2
  double chi2 = 0.0;    // 2 rho eps - kappa
  bool finite = false;  // delta2 >= 0 and chi2 < 0
};

MomentCondition heston_moment_condition(const HestonParams& p) noexcept;
bool heston_second_moment_finite(const HestonParams& p) noexcept;

/// E[exp(i u log S_t)] in the rotation-free ("little trap") form. Throws NumericError if the
/// value is not finite.
std::complex<double> heston_cf(std::complex<double> u, double t, const HestonParams& p);

/// The same characteristic function in the tanh-free textbook arrangement
///   a(t) = -kappa vbar ((gamma + beta) t / eps^2 + (2 / eps^2) log(1 - (gamma + beta)(1 - e^{-gamma t}) / (2 gamma))),
///   b(t) = (w^2 - w)(1 - e^{-gamma t}) / (2 gamma - (gamma + beta)(1 - e^{-gamma t})),
/// with w = i u, beta = w rho eps - kappa. Evaluates the principal logarithm directly; used as a
/// cross-check at short maturities.
std::complex<double> heston_cf_direct(std::complex<double> u, double t, const HestonParams& p);

/// Full-truncation Euler for V and log-Euler for S on a uniform grid of `steps_per_unit`
/// merged with the record `times` (sorted, > 0). Returns S at the record times.
PathGrid heston_simulate(const HestonParams& p, std::span<const double> times, std::size_t n_paths,
                         const BrownianDriver& driver, int steps_per_unit = 500);

/// Deterministic variance path of the eps -> 0 limit, V' = kappa (vbar - V).
double heston_mean_variance(const HestonParams& p, double t) noexcept;

}  // namespace wcm
