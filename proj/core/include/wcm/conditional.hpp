#pragma once

#include <map>
#include <span>
#include <vector>

#include "wcm/basis.hpp"
#include "wcm/multi_index.hpp"

namespace wcm {

/// E[Phi_a | F_t] for a piecewise-constant basis, t in (0, horizon].
///
/// `increments` uses the canonical (j*M + i) layout: (B_{s_{i+1}} - B_{s_i}) / sqrt(delta_i) for
/// cells i before the located cell u, and (B_t - B_{s_u}) / sqrt(t - s_u) for cell u. Entries of
/// later cells are ignored. Returns 0 as soon as a_i^j > 0 for some i > u.
double cond_exp_piecewise(const BasisSpec& spec, const MultiIndex& a, double t,
                          std::span<const double> increments);

/// Converts a row of I^t (piecewise basis, `components` components) into the increments
/// expected by cond_exp_piecewise.
std::vector<double> increments_from_integrals(const BasisSpec& spec, double t,
                                              std::span<const double> integrals, int components);

/// Finite linear combination sum_b c_b prod_{(i,j)} H_{b_i^j}(x_i^j), keyed by flat exponents.
class HermitePolyCombo {
 public:
  HermitePolyCombo(int basis_count, int components) : basis_count_(basis_count), components_(components) {}
  static HermitePolyCombo single(const MultiIndex& a, double coefficient = 1.0);

  int basis_count() const noexcept { return basis_count_; }
  int components() const noexcept { return components_; }
  const std::map<std::vector<int>, double>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  void add(const std::vector<int>& exponents, double coefficient);
  HermitePolyCombo& operator+=(const HermitePolyCombo& other);
  HermitePolyCombo& operator*=(double s);

  /// Highest total degree among the terms (0 for an empty combination).
  int degree() const noexcept;
  double evaluate(std::span<const double> x) const;

 private:
  int basis_count_;
  int components_;
  std::map<std::vector<int>, double> terms_;
};

/// A_t f with A_t = sum_j sum_{i,k} G_ik d/dx_i^j d/dx_k^j, using H_n' = H_{n-1}.
/// G is the M x M Gram tail; it acts separately within each Brownian component.
HermitePolyCombo dyson_operator_apply(const HermitePolyCombo& f, const Matrix& G);

/// sum_{n=0}^{floor(|a|/2)} (2^n n!)^{-1} (A_t)^n f as a combination, f = prod H_{a_i^j}.
HermitePolyCombo dyson_expansion(const MultiIndex& a, const Matrix& G);

/// E[Phi_a | F_t] for any orthonormal basis: the Dyson expansion evaluated at I^t,
/// with G = gram_tail(spec, t).
double dyson_cond_exp(const MultiIndex& a, std::span<const double> integrals, const Matrix& G);

/// Batched evaluator of (E[Phi_a | F_t])_a for a fixed time and index list. Built once, then
/// applied to every path's I^t row; picks the closed form for piecewise bases and the Dyson
/// expansion otherwise.
class ConditionalFeatureMap {
 public:
  ConditionalFeatureMap(const BasisSpec& spec, int components, std::span<const MultiIndex> indices, double t);

  std::size_t feature_count() const noexcept { return features_.size(); }
  /// Indices known to vanish identically at this t (piecewise: some a_i^j > 0 beyond the cell).
  bool is_zero(std::size_t k) const noexcept { return features_[k].terms.empty(); }

  /// Writes the features for one I^t row into `out` (length feature_count()).
  /// `scratch` must hold at least scratch_size() doubles.
  void evaluate(std::span<const double> integrals, std::span<double> out, std::span<double> scratch) const;
  std::size_t scratch_size() const noexcept { return static_cast<std::size_t>(width_ * (max_order_ + 1)); }

 private:
  struct Factor {
    int entry;
    int power;
  };
  struct Term {
    double coefficient;
    std::vector<Factor> factors;
  };
  struct Feature {
    std::vector<Term> terms;
  };

  int width_ = 0;
  int max_order_ = 0;
  // Piecewise closed form: entry values are scale^n H_n(x / scale); scale = 1 except in the
  // located cell, and entries beyond it are forced to H_0 only.
  std::vector<double> scale_;
  std::vector<bool> active_;
  std::vector<Feature> features_;
};

}  // namespace wcm
