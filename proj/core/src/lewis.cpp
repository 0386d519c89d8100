#include "wcm/lewis.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "wcm/errors.hpp"

namespace wcm {

double lewis_call_price(const CharFn& cf, double s0, double strike, double maturity, double rate, double dividend,
                        const LewisOptions& options) {
  if (!(s0 > 0.0) || !(strike > 0.0) || !(maturity > 0.0)) throw DomainError("lewis: s0, strike, T must be positive");
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  const double centre = std::log(s0) + (rate - dividend) * maturity;
  const double k = std::log(s0 / strike) + (rate - dividend) * maturity;
  auto integrand = [&](double u) {
    const cd z(u, -0.5);
    const cd phi = cf(z) * std::exp(-i * z * centre);
    const cd v = std::exp((i * u + 0.5) * k) * phi / (u * u + 0.25);
    return v.real();
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double scale = strike * std::exp(-rate * maturity) / std::numbers::pi;
  // Tolerances on the integral scaled so the price meets the absolute tolerance.
  const double tol = options.tolerance / scale;
  double err = 0.0;
  double total = GK::integrate(integrand, 0.0, options.u_max, 20, 1e-14, &err);
  double lo = options.u_max;
  for (;;) {
    const double hi = 2.0 * lo;
    const double piece = GK::integrate(integrand, lo, hi, 20, 1e-14, &err);
    total += piece;
    if (std::abs(piece) < 0.25 * tol) break;
    if (hi >= options.u_limit) throw NumericError("lewis: integral tail did not converge");
    lo = hi;
  }
  return s0 * std::exp(-dividend * maturity) - scale * total;
}

}  // namespace wcm
