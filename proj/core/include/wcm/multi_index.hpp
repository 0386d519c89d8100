#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wcm {

// Exponent pattern a = (a^1, ..., a^d), a^j in N^M, of one chaos element
//   Phi_a = prod_j prod_i H_{a_i^j}( int_0^T h_i dB^j ).
//
// Canonical flat layout, shared by every array in the library that is indexed
// like a multi-index (Ito integrals, normalized increments, model files):
// entry (i, j) -- basis function i, Brownian component j, both 0-based -- sits at
// j * M + i, so the M exponents of one component are contiguous.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(int basis_count, int components, std::vector<int> exponents);

  static MultiIndex zero(int basis_count, int components);

  int basis_count() const noexcept { return basis_count_; }
  int components() const noexcept { return components_; }
  std::size_t size() const noexcept { return exponents_.size(); }

  int at(int i, int j) const { return exponents_[static_cast<std::size_t>(j * basis_count_ + i)]; }
  std::span<const int> exponents() const noexcept { return exponents_; }
  std::span<const int> component(int j) const noexcept {
    return std::span<const int>(exponents_).subspan(static_cast<std::size_t>(j * basis_count_),
                                                    static_cast<std::size_t>(basis_count_));
  }

  /// |a| = sum of all entries.
  int order() const noexcept { return order_; }
  /// a! = prod of entry factorials, as a double.
  double factorial() const noexcept { return factorial_; }

  /// Largest basis function i (0-based) with a nonzero exponent in any component, or -1.
  int last_active_basis() const noexcept { return last_active_; }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept {
    return a.basis_count_ == b.basis_count_ && a.exponents_ == b.exponents_;
  }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) noexcept {
    return a.exponents_ < b.exponents_;
  }

 private:
  int basis_count_ = 0;
  int components_ = 0;
  std::vector<int> exponents_;
  int order_ = 0;
  double factorial_ = 1.0;
  int last_active_ = -1;
};

/// All a with 1 <= |a| <= P, for M basis functions and d components. Graded order
/// (by |a|), ascending lexicographic on the flat array within one order. The order
/// is part of the model-file contract.
std::vector<MultiIndex> enumerate_indices(int P, int M, int d);

/// (Md + P)! / ((Md)! P!), the dimension of the truncated chaos space including the
/// constant. Throws std::overflow_error if the count does not fit in 64 bits.
std::uint64_t index_space_dim(int P, int M, int d);

/// prod_{(i,j)} H_{a_i^j}(integrals[j*M + i]); factors with a_i^j = 0 are skipped.
/// Throws ShapeError if integrals.size() != M*d.
double phi_eval(const MultiIndex& a, std::span<const double> integrals);

/// FNV-1a hash over (M, d, P, flattened exponents) of an enumeration; stored in
/// model files so a coefficient array can be checked against its index order.
std::uint64_t index_order_hash(std::span<const MultiIndex> indices);

}  // namespace wcm
