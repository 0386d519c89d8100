#pragma once

#include <span>
#include <vector>

namespace wcm {

enum class BasisKind { PiecewiseConstant, Legendre };

/// Dense row-major matrix; used for Gram tails and small covariance blocks.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}
  static Matrix identity(int n);

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i * cols + j)]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i * cols + j)]; }
};

/// Orthonormal family (h_i)_{i<M} on [0, horizon].
///
/// PiecewiseConstant: h_i = 1_{(s_i, s_{i+1}]} / sqrt(delta_i) on a grid 0 = s_0 < ... < s_M = horizon.
/// Legendre: h_i(s) = sqrt((2i+1)/horizon) L_i(2s/horizon - 1).
/// Indices i are 0-based throughout (h_0 is the first function).
class BasisSpec {
 public:
  static BasisSpec piecewise(std::vector<double> grid);
  static BasisSpec uniform_piecewise(double horizon, int cells);
  static BasisSpec legendre(double horizon, int count);

  BasisKind kind() const noexcept { return kind_; }
  bool is_piecewise() const noexcept { return kind_ == BasisKind::PiecewiseConstant; }
  double horizon() const noexcept { return horizon_; }
  int size() const noexcept { return count_; }

  /// Grid s_0..s_M (piecewise only; empty for Legendre).
  std::span<const double> grid() const noexcept { return grid_; }
  double width(int i) const { return grid_[static_cast<std::size_t>(i + 1)] - grid_[static_cast<std::size_t>(i)]; }

  /// 0-based cell u with t in (s_u, s_{u+1}]. Throws DomainError outside (0, horizon].
  int locate_cell(double t) const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  BasisSpec() = default;
  BasisKind kind_ = BasisKind::PiecewiseConstant;
  double horizon_ = 0.0;
  int count_ = 0;
  std::vector<double> grid_;
};

/// h_i(s) for 0 <= i < M, 0 <= s <= horizon. Throws DomainError for i out of range.
double basis_eval(const BasisSpec& spec, int i, double s);

/// G_ik(t) = int_t^horizon h_i h_k ds, an M x M symmetric PSD matrix; G(0) = I, G(horizon) = 0.
/// Piecewise: closed form. Legendre: Gauss-Legendre quadrature with enough nodes to be exact
/// for the polynomial integrand.
Matrix gram_tail(const BasisSpec& spec, double t);

/// Legendre polynomial L_n(x) by the Bonnet recurrence.
double legendre_poly(int n, double x) noexcept;

}  // namespace wcm
