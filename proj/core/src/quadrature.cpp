#include "wcm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wcm/errors.hpp"

namespace wcm {

QuadratureRule gauss_hermite_rule(int n) {
  if (n < 1 || n > 128) {
    throw DomainError("gauss_hermite_rule: n must be in [1, 128], got " + std::to_string(n));
  }
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 1) {
    rule.weights[0] = 1.0;
    return rule;
  }

  // Newton iteration on orthonormal physicists' Hermite polynomials, largest root first.
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const int m = (n + 1) / 2;
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
        // One more pass so pp matches the converged root.
        p1 = pim4;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        break;
      }
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;

  const double sqrt2 = std::numbers::sqrt2;
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    // x is descending; store ascending.
    const auto src = static_cast<std::size_t>(n - 1 - k);
    rule.nodes[static_cast<std::size_t>(k)] = sqrt2 * x[src];
    rule.weights[static_cast<std::size_t>(k)] = w[src] * inv_sqrt_pi;
    total += rule.weights[static_cast<std::size_t>(k)];
  }
  // Remove the last few ulps of drift so the weights sum to one.
  for (auto& wk : rule.weights) wk /= total;
  return rule;
}

QuadratureRule gauss_legendre_rule(int n, double lo, double hi) {
  if (n < 1) throw DomainError("gauss_legendre_rule: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    const double wi = 2.0 * half / ((1.0 - z * z) * pp * pp);
    rule.nodes[static_cast<std::size_t>(i)] = mid - half * z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = mid + half * z;
    rule.weights[static_cast<std::size_t>(i)] = wi;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = wi;
  }
  return rule;
}

}  // namespace wcm
