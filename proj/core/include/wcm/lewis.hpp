#pragma once

#include <complex>
#include <functional>

namespace wcm {

/// Characteristic function of log S_T: u -> E[exp(i u log S_T)], evaluated at complex u.
using CharFn = std::function<std::complex<double>(std::complex<double>)>;

struct LewisOptions {
  double tolerance = 1e-10;  // absolute, on the price
  double u_max = 200.0;      // initial truncation, doubled until the tail is below tolerance
  double u_limit = 1e6;      // give up beyond this truncation
};

/// European call by the Lewis formula. The handle's drift term exp(i u (log S_0 + (r - q) T)) is
/// divided out internally so the integrand uses the centred log-return. Throws NumericError if
/// the tail does not converge.
double lewis_call_price(const CharFn& cf, double s0, double strike, double maturity, double rate = 0.0,
                        double dividend = 0.0, const LewisOptions& options = {});

}  // namespace wcm
