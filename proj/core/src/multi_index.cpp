#include "wcm/multi_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wcm/errors.hpp"
#include "wcm/hermite.hpp"

namespace wcm {

namespace {

double factorial_double(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void check_truncation(int P, int M, int d) {
  if (P < 0 || M < 1 || d < 1) {
    throw DomainError("invalid truncation (P=" + std::to_string(P) + ", M=" + std::to_string(M) +
                      ", d=" + std::to_string(d) + ")");
  }
}

// Appends every composition of `remaining` into exps[pos..], ascending lexicographic.
void compositions(std::vector<int>& exps, std::size_t pos, int remaining, int M, int d,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == exps.size()) {
    exps[pos] = remaining;
    out.emplace_back(M, d, exps);
    exps[pos] = 0;
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    exps[pos] = v;
    compositions(exps, pos + 1, remaining - v, M, d, out);
  }
  exps[pos] = 0;
}

}  // namespace

MultiIndex::MultiIndex(int basis_count, int components, std::vector<int> exponents)
    : basis_count_(basis_count), components_(components), exponents_(std::move(exponents)) {
  if (basis_count_ < 1 || components_ < 1 ||
      exponents_.size() != static_cast<std::size_t>(basis_count_) * static_cast<std::size_t>(components_)) {
    throw ShapeError("MultiIndex: exponent array length " + std::to_string(exponents_.size()) +
                     " does not match M*d = " + std::to_string(basis_count_ * components_));
  }
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const int e = exponents_[k];
    if (e < 0) throw DomainError("MultiIndex: negative exponent");
    order_ += e;
    factorial_ *= factorial_double(e);
    if (e > 0) last_active_ = std::max(last_active_, static_cast<int>(k) % basis_count_);
  }
}

MultiIndex MultiIndex::zero(int basis_count, int components) {
  return MultiIndex(basis_count, components,
                    std::vector<int>(static_cast<std::size_t>(basis_count * components), 0));
}

std::vector<MultiIndex> enumerate_indices(int P, int M, int d) {
  check_truncation(P, M, d);
  if (P < 1) throw DomainError("enumerate_indices: P must be >= 1");
  const auto dim = index_space_dim(P, M, d);
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(dim - 1));
  std::vector<int> exps(static_cast<std::size_t>(M * d), 0);
  for (int k = 1; k <= P; ++k) compositions(exps, 0, k, M, d, out);
  return out;
}

std::uint64_t index_space_dim(int P, int M, int d) {
  check_truncation(P, M, d);
  // C(n + P, P) built as prod_{k=1}^{P} (n + k) / k; every partial product is an
  // integer binomial, so after cancelling gcd(result, k) the division is exact.
  const std::uint64_t n = static_cast<std::uint64_t>(M) * static_cast<std::uint64_t>(d);
  std::uint64_t result = 1;
  for (int k = 1; k <= P; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    const std::uint64_t g = std::gcd(result, kk);
    const std::uint64_t factor = (n + kk) / (kk / g);
    if (__builtin_mul_overflow(result / g, factor, &result)) {
      throw std::overflow_error("index_space_dim: count exceeds 64 bits");
    }
  }
  return result;
}

double phi_eval(const MultiIndex& a, std::span<const double> integrals) {
  if (integrals.size() != a.size()) {
    throw ShapeError("phi_eval: integrals length " + std::to_string(integrals.size()) +
                     " != M*d = " + std::to_string(a.size()));
  }
  const auto exps = a.exponents();
  double value = 1.0;
  double h[32];
  for (std::size_t k = 0; k < exps.size(); ++k) {
    const int e = exps[k];
    if (e == 0) continue;
    if (e < 32) {
      hermite_fill(integrals[k], std::span<double>(h, static_cast<std::size_t>(e) + 1));
      value *= h[e];
    } else {
      value *= hermite(e, integrals[k]);
    }
  }
  return value;
}

std::uint64_t index_order_hash(std::span<const MultiIndex> indices) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  };
  mix(indices.size());
  for (const auto& a : indices) {
    mix(static_cast<std::uint64_t>(a.basis_count()));
    mix(static_cast<std::uint64_t>(a.components()));
    for (int e : a.exponents()) mix(static_cast<std::uint64_t>(e));
  }
  return h;
}

}  // namespace wcm
