#pragma once

#include <span>
#include <vector>

namespace wcm {

/// Hermite polynomials in the normalization H_n(x) = ((-1)^n / n!) e^{x^2/2} d^n/dx^n e^{-x^2/2},
/// i.e. the coefficients of t^n in exp(t x - t^2/2). With this scaling H_n' = H_{n-1} and
/// E[H_n(Z) H_m(Z)] = delta_nm / n! for a standard normal Z.
///
/// Evaluated with the three-term recurrence (n+1) H_{n+1}(x) = x H_n(x) - H_{n-1}(x).
/// Throws DomainError for non-finite x.
std::vector<double> hermite_upto(int n_max, double x);

/// Writes H_0(x), ..., H_{out.size()-1}(x) into `out`. No allocation; x must be finite.
void hermite_fill(double x, std::span<double> out) noexcept;

/// Single value H_n(x).
double hermite(int n, double x);

}  // namespace wcm
