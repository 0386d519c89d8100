#include "wcm/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wcm/errors.hpp"
#include "wcm/quadrature.hpp"

namespace wcm {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

BasisSpec BasisSpec::piecewise(std::vector<double> grid) {
  if (grid.size() < 2) throw ConfigError("piecewise basis: grid needs at least two points");
  if (grid.front() != 0.0) throw ConfigError("piecewise basis: grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1]) || !std::isfinite(grid[k])) {
      throw ConfigError("piecewise basis: grid must be strictly increasing and finite");
    }
  }
  BasisSpec b;
  b.kind_ = BasisKind::PiecewiseConstant;
  b.horizon_ = grid.back();
  b.count_ = static_cast<int>(grid.size()) - 1;
  b.grid_ = std::move(grid);
  return b;
}

BasisSpec BasisSpec::uniform_piecewise(double horizon, int cells) {
  if (!(horizon > 0.0) || cells < 1) throw ConfigError("uniform_piecewise: need horizon > 0 and cells >= 1");
  std::vector<double> grid(static_cast<std::size_t>(cells) + 1);
  for (int k = 0; k <= cells; ++k) grid[static_cast<std::size_t>(k)] = horizon * k / cells;
  grid.back() = horizon;
  return piecewise(std::move(grid));
}

BasisSpec BasisSpec::legendre(double horizon, int count) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("legendre basis: horizon must be > 0");
  if (count < 1) throw ConfigError("legendre basis: count must be >= 1");
  BasisSpec b;
  b.kind_ = BasisKind::Legendre;
  b.horizon_ = horizon;
  b.count_ = count;
  return b;
}

int BasisSpec::locate_cell(double t) const {
  if (!(t > 0.0) || t > horizon_) {
    throw DomainError("locate_cell: t = " + std::to_string(t) + " outside (0, " + std::to_string(horizon_) + "]");
  }
  if (!is_piecewise()) throw ConfigError("locate_cell: basis is not piecewise-constant");
  // First grid point >= t closes the cell (s_u, s_{u+1}].
  const auto it = std::lower_bound(grid_.begin() + 1, grid_.end(), t);
  return static_cast<int>(it - grid_.begin()) - 1;
}

double legendre_poly(int n, double x) noexcept {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double basis_eval(const BasisSpec& spec, int i, double s) {
  if (i < 0 || i >= spec.size()) {
    throw DomainError("basis_eval: index " + std::to_string(i) + " out of range [0, " +
                      std::to_string(spec.size()) + ")");
  }
  if (spec.is_piecewise()) {
    const auto g = spec.grid();
    const double lo = g[static_cast<std::size_t>(i)];
    const double hi = g[static_cast<std::size_t>(i + 1)];
    return (s > lo && s <= hi) ? 1.0 / std::sqrt(hi - lo) : 0.0;
  }
  const double T = spec.horizon();
  return std::sqrt((2.0 * i + 1.0) / T) * legendre_poly(i, 2.0 * s / T - 1.0);
}

Matrix gram_tail(const BasisSpec& spec, double t) {
  const int M = spec.size();
  const double T = spec.horizon();
  if (t < 0.0 || t > T || !std::isfinite(t)) throw DomainError("gram_tail: t outside [0, horizon]");
  Matrix G(M, M);
  if (spec.is_piecewise()) {
    const auto g = spec.grid();
    for (int i = 0; i < M; ++i) {
      const double lo = g[static_cast<std::size_t>(i)];
      const double hi = g[static_cast<std::size_t>(i + 1)];
      if (t <= lo) {
        G(i, i) = 1.0;
      } else if (t < hi) {
        G(i, i) = (hi - t) / (hi - lo);
      }
    }
    return G;
  }
  if (t == 0.0) return Matrix::identity(M);
  if (t == T) return G;
  // Integrand h_i h_k has degree <= 2M - 2, so M + 1 nodes integrate it exactly.
  const auto rule = gauss_legendre_rule(M + 1, t, T);
  std::vector<double> h(static_cast<std::size_t>(M));
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    for (int i = 0; i < M; ++i) h[static_cast<std::size_t>(i)] = basis_eval(spec, i, rule.nodes[q]);
    for (int i = 0; i < M; ++i) {
      for (int k = i; k < M; ++k) {
        G(i, k) += rule.weights[q] * h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(k)];
      }
    }
  }
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < i; ++k) G(i, k) = G(k, i);
  }
  return G;
}

}  // namespace wcm
