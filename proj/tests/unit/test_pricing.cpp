#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "wcm/errors.hpp"
#include "wcm/parallel.hpp"
#include "wcm/pricing.hpp"
#include "wcm/quadrature.hpp"

using namespace wcm;

namespace {

std::size_t find_first_order(const ChaosModel& m, int i, int j) {
  const auto idx = m.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k].order() == 1 && idx[k].at(i, j) == 1) return k;
  }
  return idx.size();
}

// First-order coefficients of size ~lin, higher orders of size ~nonlin.
ChaosModel smooth_model(const BasisSpec& basis, int d, std::uint64_t seed, double lin = 10.0, double nonlin = 1.0) {
  ChaosModel m(100.0, 2, d, basis);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> c(m.coefficient_count());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = z(rng) * (m.indices()[k].order() == 1 ? lin : nonlin);
  m.set_coefficients(c);
  return m;
}

Quote call_quote(double T, double K, double s0 = 100.0) {
  Quote q;
  q.maturity = T;
  q.strike = K;
  q.discount_factor = 1.0;
  q.forward = s0;
  q.price = std::max(s0 - K, 0.0);
  return q;
}

}  // namespace

TEST(GaussHermite, SmallRulesAndMoments) {
  const auto r1 = gauss_hermite_rule(1);
  ASSERT_EQ(r1.nodes.size(), 1u);
  EXPECT_NEAR(r1.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(r1.weights[0], 1.0, 1e-15);
  const auto r2 = gauss_hermite_rule(2);
  EXPECT_NEAR(r2.nodes[0], -1.0, 1e-14);
  EXPECT_NEAR(r2.nodes[1], 1.0, 1e-14);
  EXPECT_NEAR(r2.weights[0], 0.5, 1e-14);
  EXPECT_NEAR(r2.weights[1], 0.5, 1e-14);
  const auto r10 = gauss_hermite_rule(10);
  double m0 = 0, m2 = 0, m4 = 0, m19 = 0;
  for (int k = 0; k < 10; ++k) {
    const double z = r10.nodes[k], w = r10.weights[k];
    m0 += w, m2 += w * z * z, m4 += w * z * z * z * z, m19 += w * std::pow(z, 19);
  }
  EXPECT_NEAR(m0, 1.0, 1e-13);
  EXPECT_NEAR(m2, 1.0, 1e-12);
  EXPECT_NEAR(m4, 3.0, 1e-12);
  EXPECT_NEAR(m19, 0.0, 1e-6);
  EXPECT_THROW(gauss_hermite_rule(0), DomainError);
}

TEST(Quadrature, DeterministicModel) {
  const ChaosModel m(100.0, 2, 2, BasisSpec::uniform_piecewise(1.0, 4));
  EXPECT_NEAR(quad_call_price(m, 0.5, 90.0, 20), 10.0, 1e-13);
  EXPECT_EQ(quad_call_price(m, 0.5, 110.0, 20), 0.0);
}

TEST(Quadrature, HalfNormalMean) {
  const auto basis = BasisSpec::piecewise({0.0, 0.25, 1.0});
  ChaosModel m(100.0, 2, 2, basis);
  std::vector<double> c(m.coefficient_count(), 0.0);
  const double coef = 7.5;
  c[find_first_order(m, 0, 0)] = coef;
  m.set_coefficients(c);
  EXPECT_NEAR(quad_call_price(m, 0.25, 100.0, 40), coef / std::sqrt(2 * std::numbers::pi), 1e-6);
}

TEST(Quadrature, ConfigurationErrors) {
  const ChaosModel m(100.0, 2, 2, BasisSpec::uniform_piecewise(1.0, 4));
  EXPECT_THROW(quad_call_price(m, 0.9, 100.0, 10, 4), ConfigError);  // u*d = 8
  const ChaosModel leg(100.0, 2, 1, BasisSpec::legendre(1.0, 2));
  EXPECT_THROW(quad_call_price(leg, 0.5, 100.0, 10), ConfigError);
}

TEST(Quadrature, NodeRefinementConverges) {
  // Smooth: second-order terms small enough that S_T stays monotone along the rotated axis
  // over the Gaussian bulk, so the exercise boundary never folds.
  const auto basis = BasisSpec::uniform_piecewise(1.0, 4);
  for (auto [T, d] : {std::pair{0.25, 2}, std::pair{0.5, 1}, std::pair{0.75, 1}, std::pair{0.5, 2}}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto m = smooth_model(basis, d, seed, 10.0, 0.5);
      for (double K : {85.0, 100.0, 115.0}) {
        const double a = quad_call_price(m, T, K, 40);
        const double b = quad_call_price(m, T, K, 80);
        EXPECT_LT(std::abs(a - b), 1e-7) << T << " " << d << " " << K << " " << seed;
      }
    }
  }
}

TEST(Quadrature, FoldedBoundaryStillConverges) {
  // strong quadratic terms: the outer integrand has kinks and convergence is only algebraic
  const auto basis = BasisSpec::uniform_piecewise(1.0, 4);
  const auto m = smooth_model(basis, 1, 2, 10.0, 1.0);
  const double a = quad_call_price(m, 0.75, 115.0, 60);
  const double b = quad_call_price(m, 0.75, 115.0, 120);
  EXPECT_LT(std::abs(a - b), 1e-5);
}

TEST(Quadrature, GradientMatchesFiniteDifferences) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 4);
  const auto m = smooth_model(basis, 2, 5, 8.0, 1.5);
  const auto block = quadrature_block(m, 0.5, 24);
  std::vector<double> g(m.coefficient_count());
  quad_call_price(m, block, 103.0, g);
  const double h = 1e-5;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto up = std::vector<double>(m.coefficients().begin(), m.coefficients().end());
    auto dn = up;
    up[k] += h;
    dn[k] -= h;
    const ChaosModel mu(100.0, 2, 2, basis, up), md(100.0, 2, 2, basis, dn);
    const double fd = (quad_call_price(mu, block, 103.0) - quad_call_price(md, block, 103.0)) / (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-6 * std::max(1.0, std::abs(fd))) << k;
  }
}

TEST(MonteCarlo, DeterministicAndHalfNormal) {
  const auto basis = BasisSpec::piecewise({0.0, 0.25, 1.0});
  ChaosModel m(100.0, 2, 2, basis);
  const auto block = sample_features(m, 0.25, 100000, BrownianDriver{1, 0});
  const auto p0 = mc_call_price(m, block, 90.0);
  EXPECT_EQ(p0.price, 10.0);
  EXPECT_EQ(p0.std_error, 0.0);
  std::vector<double> c(m.coefficient_count(), 0.0);
  c[find_first_order(m, 0, 1)] = 5.0;
  m.set_coefficients(c);
  const auto p = mc_call_price(m, block, 100.0);
  EXPECT_NEAR(p.price, 5.0 / std::sqrt(2 * std::numbers::pi), 3 * p.std_error);
}

TEST(ControlVariate, DegenerateAndDeepInTheMoney) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 2);
  const ChaosModel zero(100.0, 2, 2, basis);
  const auto est = sample_features(zero, 0.7, 10000, BrownianDriver{2, 1});
  const auto cv0 = estimate_cv(zero, est, 100.0, 2);
  EXPECT_TRUE(cv0.degraded);
  EXPECT_EQ(cv0.degree, 0);

  const auto m = smooth_model(basis, 2, 3, 5.0, 0.5);
  const auto est2 = sample_features(m, 0.7, 10000, BrownianDriver{2, 1});
  double sd = std::sqrt(second_moment(m, 0.7) - 1e4);
  const auto cv1 = estimate_cv(m, est2, 100.0 - 10.0 * sd, 1);
  EXPECT_EQ(cv1.degree, 1);
  EXPECT_NEAR(cv1.beta[0], 1.0, 1e-6);
}

TEST(ControlVariate, VarianceReductionMatchesRSquared) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 2);
  const auto m = smooth_model(basis, 2, 4, 5.0, 1.0);
  const double T = 0.9, K = 100.0;
  const auto est = sample_features(m, T, 20000, BrownianDriver{3, 1});
  const auto fresh = sample_features(m, T, 200000, BrownianDriver{3, 2});
  double prev_var = INFINITY;
  for (int deg : {1, 2}) {
    const auto cv = estimate_cv(m, est, K, deg);
    ASSERT_EQ(cv.degree, deg);
    EXPECT_GT(cv.r2, 0.0);
    EXPECT_LT(cv.r2, 1.0);
    const auto plain = mc_call_price(m, fresh, K);
    const auto ctl = mc_call_price(m, fresh, K, &cv);
    const double ratio = (ctl.std_error * ctl.std_error) / (plain.std_error * plain.std_error);
    EXPECT_NEAR(ratio, 1.0 - cv.r2, 0.03) << deg;
    EXPECT_NEAR(ctl.price, plain.price, 4 * plain.std_error);
    EXPECT_LE(ratio, prev_var * 1.01);
    prev_var = ratio;
  }
}

TEST(MonteCarlo, AgreesWithQuadrature) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 4);
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto m = smooth_model(basis, 2, seed, 6.0, 2.0);
    const auto block = sample_features(m, 0.5, 200000, BrownianDriver{seed, 0});
    for (double K : {90.0, 100.0, 110.0}) {
      const auto mc = mc_call_price(m, block, K);
      EXPECT_NEAR(mc.price, quad_call_price(m, 0.5, K, 30), 3.5 * mc.std_error) << seed << " " << K;
    }
  }
}

TEST(MonteCarlo, CallPricesDecreaseInStrike) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 4);
  const auto m = smooth_model(basis, 2, 21, 6.0, 2.0);
  const auto block = sample_features(m, 1.0, 50000, BrownianDriver{7, 0});
  double prev = INFINITY;
  for (double K = 80.0; K <= 120.0; K += 5.0) {
    const double p = mc_call_price(m, block, K).price;
    EXPECT_LE(p, prev);
    if (std::isfinite(prev)) {
      EXPECT_GE((p - prev) / 5.0, -1.0);
    }
    prev = p;
  }
}

TEST(MonteCarlo, GradientMatchesFiniteDifferencesWithFrozenBeta) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 2);
  const auto m = smooth_model(basis, 2, 8, 5.0, 1.0);
  const auto block = sample_features(m, 0.8, 20000, BrownianDriver{9, 0});
  const auto est = sample_features(m, 0.8, 5000, BrownianDriver{9, 1});
  const double K = 101.0;
  const auto cv = estimate_cv(m, est, K, 2);
  std::vector<double> g(m.coefficient_count());
  call_price_gradient(m, block, K, &cv, g);
  // With beta frozen the estimator is piecewise linear in theta; a tiny step avoids indicator flips.
  const double h = 1e-7;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto up = std::vector<double>(m.coefficients().begin(), m.coefficients().end());
    auto dn = up;
    up[k] += h;
    dn[k] -= h;
    const ChaosModel mu(100.0, 2, 2, basis, up), md(100.0, 2, 2, basis, dn);
    auto cu = cv, cd = cv;
    cu.second_moment = second_moment(mu, 0.8);
    cd.second_moment = second_moment(md, 0.8);
    const double fd = (mc_call_price(mu, block, K, &cu).price - mc_call_price(md, block, K, &cd).price) / (2 * h);
    EXPECT_NEAR(g[k], fd, 1e-5 * std::max(1.0, std::abs(fd))) << k;
  }
}

TEST(MonteCarlo, BitIdenticalAcrossThreadCounts) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 2);
  const auto m = smooth_model(basis, 2, 1);
  set_thread_count(1);
  const auto b1 = sample_features(m, 1.0, 30000, BrownianDriver{4, 0});
  const auto p1 = mc_call_price(m, b1, 100.0);
  set_thread_count(3);
  const auto b3 = sample_features(m, 1.0, 30000, BrownianDriver{4, 0});
  const auto p3 = mc_call_price(m, b3, 100.0);
  set_thread_count(0);
  EXPECT_EQ(b1.data, b3.data);
  EXPECT_EQ(p1.price, p3.price);
  EXPECT_EQ(p1.std_error, p3.std_error);
}

TEST(Streams, PlanKeepsRolesApart) {
  StreamPlan plan;
  std::set<std::uint32_t> seen;
  for (int e = 0; e < 5; ++e) {
    for (int g = 0; g < 10; ++g) {
      EXPECT_TRUE(seen.insert(plan.pricing(g, e).stream).second);
      EXPECT_TRUE(seen.insert(plan.cv_estimation(g, e).stream).second);
    }
  }
  for (int g = 0; g < 10; ++g) {
    EXPECT_TRUE(seen.insert(plan.evaluation(g).stream).second);
    EXPECT_TRUE(seen.insert(plan.evaluation(g).stream + 1).second);
  }
}

TEST(PriceSurface, ZeroModelGivesIntrinsic) {
  const ChaosModel m(100.0, 2, 2, BasisSpec::uniform_piecewise(1.0, 4));
  QuoteSurface qs;
  qs.spot = 100.0;
  for (double T : {0.25, 1.0}) {
    for (double K : {80.0, 100.0, 120.0}) qs.quotes.push_back(call_quote(T, K));
  }
  PricingSchedule sched;
  sched.fallback = PricingMethod::monte_carlo(1000, 0);
  sched.entries.push_back({0.25, PricingMethod::quadrature(10)});
  const auto p = price_surface(m, qs, sched, StreamPlan{});
  for (std::size_t k = 0; k < qs.quotes.size(); ++k) {
    EXPECT_NEAR(p[k].price, std::max(100.0 - qs.quotes[k].strike, 0.0), 1e-12);
  }
}

TEST(PriceSurface, QuadratureAndMonteCarloEntriesAgree) {
  const auto basis = BasisSpec::uniform_piecewise(1.0, 4);
  const auto m = smooth_model(basis, 2, 30, 6.0, 1.0);
  QuoteSurface qs;
  qs.spot = 100.0;
  for (double K : {95.0, 100.0, 105.0}) qs.quotes.push_back(call_quote(0.5, K));
  PricingSchedule quad, mc;
  quad.fallback = PricingMethod::quadrature(30);
  mc.fallback = PricingMethod::monte_carlo(100000, 2);
  const auto pq = price_surface(m, qs, quad, StreamPlan{});
  const auto pm = price_surface(m, qs, mc, StreamPlan{});
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(pq[k].price, pm[k].price, 3.5 * pm[k].std_error);
}

TEST(PriceSurface, RejectsMaturitiesBeyondHorizonAndAppliesForward) {
  const ChaosModel m(100.0, 2, 1, BasisSpec::uniform_piecewise(1.0, 2));
  QuoteSurface qs;
  qs.spot = 100.0;
  qs.quotes.push_back(call_quote(1.2, 100.0));
  qs.quotes.push_back(call_quote(1.5, 100.0));
  try {
    price_surface(m, qs, PricingSchedule{}, StreamPlan{});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("1.2"), std::string::npos);
    EXPECT_NE(what.find("1.5"), std::string::npos);
  }
  // deterministic model with DF = 0.95, F = 105: DF (F - K)_+
  QuoteSurface fw;
  fw.spot = 100.0;
  auto q = call_quote(0.5, 90.0);
  q.discount_factor = 0.95;
  q.forward = 105.0;
  fw.quotes.push_back(q);
  PricingSchedule s;
  s.fallback = PricingMethod::monte_carlo(100, 0);
  EXPECT_NEAR(price_surface(m, fw, s, StreamPlan{})[0].price, 0.95 * 15.0, 1e-12);
}

TEST(PriceSurface, PaperStyleScheduleIsAccepted) {
  const auto m = smooth_model(BasisSpec::piecewise({0.0, 0.1, 0.25, 0.6, 1.0}), 2, 3, 3.0, 0.3);
  QuoteSurface qs;
  qs.spot = 100.0;
  for (double T : {0.1, 0.25, 0.6, 1.0}) qs.quotes.push_back(call_quote(T, 100.0));
  PricingSchedule sched;
  sched.fallback = PricingMethod::monte_carlo(20000, 2);
  sched.entries = {{0.1, PricingMethod::quadrature(40)}, {0.25, PricingMethod::quadrature(25)}};
  const auto p = price_surface(m, qs, sched, StreamPlan{});
  for (const auto& e : p) EXPECT_GT(e.price, 0.0);
  EXPECT_EQ(p[0].std_error, 0.0);
  EXPECT_GT(p[3].std_error, 0.0);
}
