#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wcm/conditional.hpp"
#include "wcm/errors.hpp"
#include "wcm/hermite.hpp"
#include "wcm/integrals.hpp"

using namespace wcm;

namespace {

// I^t for a piecewise basis from normalized increments (cells after u are zero).
std::vector<double> integrals_from_increments(const BasisSpec& spec, double t, const std::vector<double>& z, int d) {
  const int M = spec.size();
  const int u = spec.locate_cell(t);
  const double frac = (t - spec.grid()[u]) / spec.width(u);
  std::vector<double> I(z.size(), 0.0);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < u; ++i) I[j * M + i] = z[j * M + i];
    I[j * M + u] = std::sqrt(frac) * z[j * M + u];
  }
  return I;
}

MultiIndex random_index(std::mt19937_64& rng, int M, int d, int max_order) {
  std::uniform_int_distribution<int> order(1, max_order);
  std::uniform_int_distribution<int> slot(0, M * d - 1);
  std::vector<int> e(static_cast<std::size_t>(M * d), 0);
  const int n = order(rng);
  for (int k = 0; k < n; ++k) ++e[slot(rng)];
  return MultiIndex(M, d, e);
}

}  // namespace

TEST(CondExpPiecewise, FirstOrderFirstCell) {
  const auto spec = BasisSpec::piecewise({0.0, 0.5, 1.0});
  const MultiIndex a(2, 1, {1, 0});
  const double t = 0.3, b = 0.42;  // B_t = b
  const std::vector<double> incr{b / std::sqrt(t), 9.0};
  EXPECT_NEAR(cond_exp_piecewise(spec, a, t, incr), b / std::sqrt(0.5), 1e-15);
}

TEST(CondExpPiecewise, LaterCellsVanish) {
  const auto spec = BasisSpec::uniform_piecewise(1.0, 3);
  const std::vector<double> incr{0.3, -1.2, 0.8, 0.1, 0.5, 2.0};
  EXPECT_EQ(cond_exp_piecewise(spec, MultiIndex(3, 2, {1, 0, 0, 0, 0, 1}), 0.5, incr), 0.0);
  EXPECT_EQ(cond_exp_piecewise(spec, MultiIndex(3, 2, {0, 1, 0, 0, 0, 0}), 0.2, incr), 0.0);
  EXPECT_THROW(cond_exp_piecewise(spec, MultiIndex(3, 2, {1, 0, 0, 0, 0, 0}), 0.0, incr), DomainError);
}

TEST(CondExpPiecewise, CellBoundaryGivesTerminalValue) {
  const auto spec = BasisSpec::piecewise({0.0, 0.4, 0.7, 1.0});
  const std::vector<double> incr{0.3, -1.2, 0.8, 0.1, 0.5, 2.0};
  const MultiIndex a(3, 2, {2, 1, 0, 1, 1, 0});
  EXPECT_NEAR(cond_exp_piecewise(spec, a, 0.7, incr), phi_eval(a, incr), 1e-14);
}

TEST(DysonOperator, Examples) {
  Matrix g1(1, 1);
  g1(0, 0) = 0.37;
  const auto r1 = dyson_operator_apply(HermitePolyCombo::single(MultiIndex(1, 1, {2})), g1);
  ASSERT_EQ(r1.terms().size(), 1u);
  EXPECT_EQ(r1.terms().begin()->first, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(r1.terms().begin()->second, 0.37);

  Matrix g2(2, 2);
  g2(0, 0) = 0.9;
  g2(1, 1) = 0.4;
  g2(0, 1) = g2(1, 0) = 0.15;
  const auto r2 = dyson_operator_apply(HermitePolyCombo::single(MultiIndex(2, 1, {1, 1})), g2);
  ASSERT_EQ(r2.terms().size(), 1u);
  EXPECT_EQ(r2.terms().begin()->first, (std::vector<int>{0, 0}));
  EXPECT_DOUBLE_EQ(r2.terms().begin()->second, 2 * 0.15);

  EXPECT_TRUE(dyson_operator_apply(HermitePolyCombo::single(MultiIndex(2, 1, {1, 0})), g2).empty());
  // components do not mix
  EXPECT_TRUE(dyson_operator_apply(HermitePolyCombo::single(MultiIndex(1, 2, {1, 1})), g1).empty());
}

// Single-factor H_2 against the martingale (I_t^2 - U_t) / 2 with U_t = int_0^t h^2.
TEST(DysonCondExp, SecondOrderMatchesMartingaleForm) {
  const double T = 1.7;
  const auto spec = BasisSpec::legendre(T, 1);
  const MultiIndex a(1, 1, {2});
  for (double t = 0.0; t <= T + 1e-12; t += T / 40) {
    const double U = t / T;
    for (double I : {-2.1, -0.3, 0.0, 0.8, 1.9}) {
      const double v = dyson_cond_exp(a, std::vector<double>{I}, gram_tail(spec, std::min(t, T)));
      EXPECT_NEAR(v, (I * I - U) / 2.0, 1e-12);
    }
  }
}

TEST(DysonCondExp, TerminalAndFirstOrder) {
  const auto spec = BasisSpec::legendre(1.0, 3);
  const std::vector<double> I{0.4, -1.1, 0.7};
  const MultiIndex a(3, 1, {2, 0, 2});
  EXPECT_NEAR(dyson_cond_exp(a, I, gram_tail(spec, 1.0)), phi_eval(a, I), 1e-14);
  const MultiIndex b(3, 1, {0, 1, 0});
  EXPECT_NEAR(dyson_cond_exp(b, I, gram_tail(spec, 0.35)), -1.1, 1e-15);
}

TEST(DysonCondExp, AgreesWithPiecewiseClosedForm) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> msize(1, 6), dsize(1, 2);
  for (int rep = 0; rep < 1000; ++rep) {
    const int M = msize(rng), d = dsize(rng);
    std::vector<double> grid{0.0};
    std::uniform_real_distribution<double> step(0.05, 0.5);
    for (int i = 0; i < M; ++i) grid.push_back(grid.back() + step(rng));
    const auto spec = BasisSpec::piecewise(grid);
    const double t = std::uniform_real_distribution<double>(1e-3, grid.back())(rng);
    const auto a = random_index(rng, M, d, 4);
    std::vector<double> incr(static_cast<std::size_t>(M * d));
    for (auto& v : incr) v = z(rng);
    const auto I = integrals_from_increments(spec, t, incr, d);
    const double closed = cond_exp_piecewise(spec, a, t, incr);
    const double dyson = dyson_cond_exp(a, I, gram_tail(spec, t));
    ASSERT_NEAR(closed, dyson, 1e-10) << "rep " << rep;
    const auto back = increments_from_integrals(spec, t, I, d);
    const int u = spec.locate_cell(t);
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i <= u; ++i) EXPECT_NEAR(back[j * M + i], incr[j * M + i], 1e-12);
    }
  }
}

TEST(FeatureMap, MatchesDirectFormulas) {
  const std::vector<double> I{0.3, -0.8, 1.2, 0.05};
  for (const auto& spec : {BasisSpec::piecewise({0.0, 0.3, 1.0}), BasisSpec::legendre(1.0, 2)}) {
    const auto idx = enumerate_indices(3, 2, 2);
    const double t = 0.6;
    const std::vector<double>& row = I;
    const ConditionalFeatureMap map(spec, 2, idx, t);
    std::vector<double> out(idx.size()), scratch(map.scratch_size());
    map.evaluate(row, out, scratch);
    const auto G = gram_tail(spec, t);
    for (std::size_t k = 0; k < idx.size(); ++k) EXPECT_NEAR(out[k], dyson_cond_exp(idx[k], row, G), 1e-12) << k;
  }
}

TEST(FeatureMap, MartingaleMeans) {
  for (const auto& spec : {BasisSpec::uniform_piecewise(1.0, 3), BasisSpec::legendre(1.0, 3)}) {
    const auto idx = enumerate_indices(3, 3, 1);
    const std::vector<double> times{0.2, 0.55, 1.0};
    const std::size_t n = 100000;
    BrownianDriver drv{77, 0, 512};
    const auto s = sample_integrals(spec, 1, drv, times, n);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const ConditionalFeatureMap map(spec, 1, idx, times[k]);
      std::vector<double> sum(idx.size(), 0.0), sq(idx.size(), 0.0), out(idx.size()), scratch(map.scratch_size());
      for (std::size_t p = 0; p < n; ++p) {
        map.evaluate(s.row(k, p), out, scratch);
        for (std::size_t c = 0; c < idx.size(); ++c) sum[c] += out[c], sq[c] += out[c] * out[c];
      }
      for (std::size_t c = 0; c < idx.size(); ++c) {
        const double mean = sum[c] / n;
        const double se = std::sqrt(std::max(sq[c] / n - mean * mean, 0.0) / n);
        if (map.is_zero(c)) {
          EXPECT_EQ(sum[c], 0.0);
          continue;
        }
        // sums with a Legendre fine grid carry a small discretization bias
        EXPECT_LE(std::abs(mean), 4.0 * se + (spec.is_piecewise() ? 0.0 : 5e-3)) << k << " " << c;
      }
    }
  }
}

// E[Phi_a | F_t] - E[Phi_a | F_s] is uncorrelated with F_s-measurable features.
TEST(FeatureMap, TowerPropertyStatistically) {
  const auto spec = BasisSpec::piecewise({0.0, 0.4, 1.0});
  const auto idx = enumerate_indices(2, 2, 2);
  const std::vector<double> times{0.25, 0.7};
  const std::size_t n = 200000;
  const auto s = sample_integrals(spec, 2, BrownianDriver{8, 0}, times, n);
  const ConditionalFeatureMap ms(spec, 2, idx, 0.25), mt(spec, 2, idx, 0.7);
  std::vector<double> fs(idx.size()), ft(idx.size()), scratch(std::max(ms.scratch_size(), mt.scratch_size()));
  // first-order index on the first cell of component 0, alive at s
  std::size_t probe_index = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k].order() == 1 && idx[k].at(0, 0) == 1) probe_index = k;
  }
  for (std::size_t c = 0; c < idx.size(); ++c) {
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      ms.evaluate(s.row(0, p), fs, scratch);
      mt.evaluate(s.row(1, p), ft, scratch);
      const double v = (ft[c] - fs[c]) * fs[probe_index];
      acc += v;
      acc2 += v * v;
    }
    const double mean = acc / n;
    const double se = std::sqrt(std::max(acc2 / n - mean * mean, 0.0) / n);
    EXPECT_LE(std::abs(mean), 4.0 * se + 1e-12) << c;
  }
}
