#include "wcm/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wcm/errors.hpp"
#include "wcm/hermite.hpp"

namespace wcm {

namespace {

// U^{n/2} H_n(x / sqrt(U)) for n = 0..out.size()-1, written without dividing by sqrt(U):
// the scaled family satisfies (n+1) P_{n+1} = x P_n - U P_{n-1}.
void scaled_hermite_fill(double x, double U, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    out[n + 1] = (x * out[n] - U * out[n - 1]) / static_cast<double>(n + 1);
  }
}

}  // namespace

double cond_exp_piecewise(const BasisSpec& spec, const MultiIndex& a, double t,
                          std::span<const double> increments) {
  if (!spec.is_piecewise()) throw ConfigError("cond_exp_piecewise: basis is not piecewise-constant");
  if (!(t > 0.0) || t > spec.horizon()) {
    throw DomainError("cond_exp_piecewise: t = " + std::to_string(t) + " outside (0, horizon]");
  }
  if (a.basis_count() != spec.size()) throw ShapeError("cond_exp_piecewise: index and basis sizes differ");
  if (increments.size() != a.size()) throw ShapeError("cond_exp_piecewise: increments length mismatch");
  const int u = spec.locate_cell(t);
  if (a.last_active_basis() > u) return 0.0;
  const int M = spec.size();
  const double lo = spec.grid()[static_cast<std::size_t>(u)];
  const double frac = (t - lo) / spec.width(u);
  double value = 1.0;
  for (int j = 0; j < a.components(); ++j) {
    for (int i = 0; i <= u; ++i) {
      const int e = a.at(i, j);
      if (e == 0) continue;
      const double h = hermite(e, increments[static_cast<std::size_t>(j * M + i)]);
      value *= (i == u) ? std::pow(frac, 0.5 * e) * h : h;
    }
  }
  return value;
}

std::vector<double> increments_from_integrals(const BasisSpec& spec, double t,
                                              std::span<const double> integrals, int components) {
  const int M = spec.size();
  if (integrals.size() != static_cast<std::size_t>(M * components)) {
    throw ShapeError("increments_from_integrals: length mismatch");
  }
  const int u = spec.locate_cell(t);
  const double lo = spec.grid()[static_cast<std::size_t>(u)];
  const double ratio = std::sqrt(spec.width(u) / (t - lo));
  std::vector<double> z(integrals.begin(), integrals.end());
  for (int j = 0; j < components; ++j) z[static_cast<std::size_t>(j * M + u)] *= ratio;
  return z;
}

HermitePolyCombo HermitePolyCombo::single(const MultiIndex& a, double coefficient) {
  HermitePolyCombo c(a.basis_count(), a.components());
  c.add(std::vector<int>(a.exponents().begin(), a.exponents().end()), coefficient);
  return c;
}

void HermitePolyCombo::add(const std::vector<int>& exponents, double coefficient) {
  if (exponents.size() != static_cast<std::size_t>(basis_count_ * components_)) {
    throw ShapeError("HermitePolyCombo: exponent length mismatch");
  }
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

HermitePolyCombo& HermitePolyCombo::operator+=(const HermitePolyCombo& other) {
  if (other.basis_count_ != basis_count_ || other.components_ != components_) {
    throw ShapeError("HermitePolyCombo: adding combinations of different shapes");
  }
  for (const auto& [e, c] : other.terms_) add(e, c);
  return *this;
}

HermitePolyCombo& HermitePolyCombo::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

int HermitePolyCombo::degree() const noexcept {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    deg = std::max(deg, s);
  }
  return deg;
}

double HermitePolyCombo::evaluate(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(basis_count_ * components_)) {
    throw ShapeError("HermitePolyCombo::evaluate: argument length mismatch");
  }
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double prod = c;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] != 0) prod *= hermite(e[k], x[k]);
    }
    total += prod;
  }
  return total;
}

HermitePolyCombo dyson_operator_apply(const HermitePolyCombo& f, const Matrix& G) {
  const int M = f.basis_count();
  if (G.rows != M || G.cols != M) {
    throw ShapeError("dyson_operator_apply: Gram matrix must be " + std::to_string(M) + "x" + std::to_string(M));
  }
  HermitePolyCombo out(M, f.components());
  std::vector<int> e2;
  for (const auto& [e, c] : f.terms()) {
    for (int j = 0; j < f.components(); ++j) {
      const int base = j * M;
      for (int i = 0; i < M; ++i) {
        const int ei = e[static_cast<std::size_t>(base + i)];
        if (ei == 0) continue;
        // Diagonal: d^2/dx_i^2 H_{e_i} = H_{e_i - 2}.
        if (ei >= 2 && G(i, i) != 0.0) {
          e2 = e;
          e2[static_cast<std::size_t>(base + i)] -= 2;
          out.add(e2, c * G(i, i));
        }
        // Off-diagonal (i, k) and (k, i) contribute equally.
        for (int k = i + 1; k < M; ++k) {
          const int ek = e[static_cast<std::size_t>(base + k)];
          if (ek == 0 || G(i, k) == 0.0) continue;
          e2 = e;
          e2[static_cast<std::size_t>(base + i)] -= 1;
          e2[static_cast<std::size_t>(base + k)] -= 1;
          out.add(e2, 2.0 * c * G(i, k));
        }
      }
    }
  }
  return out;
}

HermitePolyCombo dyson_expansion(const MultiIndex& a, const Matrix& G) {
  HermitePolyCombo total = HermitePolyCombo::single(a);
  HermitePolyCombo power = HermitePolyCombo::single(a);
  double prefactor = 1.0;
  for (int n = 1; n <= a.order() / 2; ++n) {
    power = dyson_operator_apply(power, G);
    if (power.empty()) break;
    prefactor /= 2.0 * n;  // 1 / (2^n n!)
    HermitePolyCombo scaled = power;
    scaled *= prefactor;
    total += scaled;
  }
  return total;
}

double dyson_cond_exp(const MultiIndex& a, std::span<const double> integrals, const Matrix& G) {
  if (integrals.size() != a.size()) throw ShapeError("dyson_cond_exp: integrals length mismatch");
  return dyson_expansion(a, G).evaluate(integrals);
}

ConditionalFeatureMap::ConditionalFeatureMap(const BasisSpec& spec, int components,
                                             std::span<const MultiIndex> indices, double t) {
  const int M = spec.size();
  width_ = M * components;
  if (!(t >= 0.0) || t > spec.horizon()) throw DomainError("ConditionalFeatureMap: t outside [0, horizon]");
  for (const auto& a : indices) {
    if (a.basis_count() != M || a.components() != components) {
      throw ShapeError("ConditionalFeatureMap: index shape does not match basis");
    }
    max_order_ = std::max(max_order_, a.order());
  }
  scale_.assign(static_cast<std::size_t>(width_), 1.0);
  active_.assign(static_cast<std::size_t>(width_), true);

  auto factors_of = [&](const std::vector<int>& e) {
    std::vector<Factor> f;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] != 0) f.push_back({static_cast<int>(k), e[k]});
    }
    return f;
  };

  features_.resize(indices.size());
  if (spec.is_piecewise()) {
    if (t == 0.0) {
      std::fill(active_.begin(), active_.end(), false);
      return;  // every feature of order >= 1 vanishes at t = 0
    }
    const int u = spec.locate_cell(t);
    const double lo = spec.grid()[static_cast<std::size_t>(u)];
    const double frac = (t - lo) / spec.width(u);
    for (int j = 0; j < components; ++j) {
      scale_[static_cast<std::size_t>(j * M + u)] = frac;
      for (int i = u + 1; i < M; ++i) active_[static_cast<std::size_t>(j * M + i)] = false;
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const auto& a = indices[k];
      if (a.last_active_basis() > u) continue;
      std::vector<int> e(a.exponents().begin(), a.exponents().end());
      features_[k].terms.push_back({1.0, factors_of(e)});
    }
    return;
  }

  const Matrix G = gram_tail(spec, t);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto combo = dyson_expansion(indices[k], G);
    for (const auto& [e, c] : combo.terms()) features_[k].terms.push_back({c, factors_of(e)});
  }
}

void ConditionalFeatureMap::evaluate(std::span<const double> integrals, std::span<double> out,
                                     std::span<double> scratch) const {
  const auto stride = static_cast<std::size_t>(max_order_ + 1);
  for (int k = 0; k < width_; ++k) {
    auto table = scratch.subspan(static_cast<std::size_t>(k) * stride, stride);
    if (!active_[static_cast<std::size_t>(k)]) {
      std::fill(table.begin(), table.end(), 0.0);
      table[0] = 1.0;
    } else {
      // scale_ holds U = (t - s_u)/delta_u for the located cell; the integral row stores
      // sqrt(delta_u)^{-1} (B_t - B_{s_u}), so the closed form is U^{n/2} H_n(I / sqrt(U)).
      scaled_hermite_fill(integrals[static_cast<std::size_t>(k)], scale_[static_cast<std::size_t>(k)], table);
    }
  }
  for (std::size_t f = 0; f < features_.size(); ++f) {
    double total = 0.0;
    for (const auto& term : features_[f].terms) {
      double prod = term.coefficient;
      for (const auto& fac : term.factors) {
        prod *= scratch[static_cast<std::size_t>(fac.entry) * stride + static_cast<std::size_t>(fac.power)];
      }
      total += prod;
    }
    out[f] = total;
  }
}

}  // namespace wcm
