#pragma once

#include <vector>

namespace wcm {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Hermite rule for the standard normal measure: sum_m w_m p(z_m) = E[p(Z)]
/// for polynomials p of degree <= 2n-1, weights sum to 1, nodes ascending.
/// Obtained from the physicists' rule (weight e^{-x^2}) by z = sqrt(2) x, w = w_phys / sqrt(pi).
/// Valid for 1 <= n <= 128; throws DomainError otherwise.
QuadratureRule gauss_hermite_rule(int n);

/// n-point Gauss-Legendre rule on [lo, hi], exact for polynomials of degree <= 2n-1.
QuadratureRule gauss_legendre_rule(int n, double lo, double hi);

}  // namespace wcm
