#include "wcm/rough_heston.hpp"

#include <cmath>

#include "wcm/errors.hpp"

namespace wcm {

using cd = std::complex<double>;

void RoughHestonParams::validate() const {
  heston.validate();
  if (!(alpha > 0.5 && alpha <= 1.0)) throw DomainError("rough heston: alpha must lie in (1/2, 1]");
  if (steps_per_unit < 1) throw ConfigError("rough heston: steps_per_unit must be positive");
}

cd rough_riccati_rhs(cd w, cd psi, const HestonParams& p) noexcept {
  return 0.5 * (w * w - w) + (p.rho * p.eps * w - p.kappa) * psi + 0.5 * p.eps * p.eps * psi * psi;
}

std::vector<cd> rough_riccati_solve(cd u, const RoughHestonParams& rp, double t, int n_steps) {
  rp.validate();
  if (n_steps < 1 || !(t >= 0.0)) throw ConfigError("rough_riccati_solve: need t >= 0 and n_steps >= 1");
  const std::size_t N = static_cast<std::size_t>(n_steps);
  std::vector<cd> psi(N + 1, 0.0), F(N + 1, 0.0);
  const cd w = cd(0.0, 1.0) * u;
  const double a = rp.alpha;
  const double h = t / n_steps;
  const double ha = std::pow(h, a);
  const double pred_scale = ha / std::tgamma(a + 1.0);
  const double corr_scale = ha / std::tgamma(a + 2.0);
  // pw1[m] = m^{alpha+1}, pw[m] = m^alpha.
  std::vector<double> pw(N + 2), pw1(N + 2);
  for (std::size_t m = 0; m < N + 2; ++m) {
    pw[m] = std::pow(static_cast<double>(m), a);
    pw1[m] = std::pow(static_cast<double>(m), a + 1.0);
  }
  F[0] = rough_riccati_rhs(w, 0.0, rp.heston);
  for (std::size_t k = 0; k < N; ++k) {
    // Predictor: fractional rectangle rule.
    cd pred = 0.0;
    for (std::size_t j = 0; j <= k; ++j) pred += (pw[k + 1 - j] - pw[k - j]) * F[j];
    pred *= pred_scale;
    // Corrector: fractional trapezoidal rule.
    const double kk = static_cast<double>(k);
    cd corr = (pw1[k] - (kk - a) * pw[k + 1]) * F[0];
    for (std::size_t j = 1; j <= k; ++j) corr += (pw1[k - j + 2] + pw1[k - j] - 2.0 * pw1[k - j + 1]) * F[j];
    corr += rough_riccati_rhs(w, pred, rp.heston);
    psi[k + 1] = corr_scale * corr;
    if (!(std::abs(psi[k + 1]) <= 1e8)) {
      throw NumericError("rough_riccati_solve: solution exploded at t = " + std::to_string((k + 1) * h));
    }
    F[k + 1] = rough_riccati_rhs(w, psi[k + 1], rp.heston);
  }
  return psi;
}

cd rough_heston_cf(cd u, double t, const RoughHestonParams& rp) {
  rp.validate();
  const auto& p = rp.heston;
  const cd w = cd(0.0, 1.0) * u;
  const cd drift = w * (std::log(p.s0) + (p.rate - p.dividend) * t);
  if (t == 0.0) return std::exp(drift);
  const int n = std::max(100, static_cast<int>(std::ceil(t * rp.steps_per_unit - 1e-9)));
  const auto psi = rough_riccati_solve(u, rp, t, n);
  const double h = t / n;
  cd int_psi = 0.0, int_r = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double wt = (k == 0 || k == n) ? 0.5 * h : h;
    int_psi += wt * psi[static_cast<std::size_t>(k)];
    int_r += wt * rough_riccati_rhs(w, psi[static_cast<std::size_t>(k)], p);
  }
  const cd v = std::exp(drift + p.kappa * p.vbar * int_psi + p.v0 * int_r);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericError("rough_heston_cf: non-finite value");
  return v;
}

}  // namespace wcm
