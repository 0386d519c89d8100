#include "wcm/exotic_bs.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "wcm/black_scholes.hpp"
#include "wcm/errors.hpp"
#include "wcm/quadrature.hpp"

namespace wcm {

namespace {

double call(double spot, double strike, double T, double vol, const MarketParams& m) {
  return bs_call({spot, strike, T, vol, m.rate, m.dividend});
}

// Price of (S_T - K) 1{S_T > H} from spot x.
double gap_call(double x, double K, double H, double T, double vol, const MarketParams& m) {
  const double sd = vol * std::sqrt(T);
  const double d2 = (std::log(x / H) + (m.rate - m.dividend - 0.5 * vol * vol) * T) / sd;
  return call(x, H, T, vol, m) + (H - K) * std::exp(-m.rate * T) * normal_cdf(d2);
}

double down_and_out(const DownAndOut& s, const MarketParams& m, double vol) {
  if (!(s.barrier > 0.0) || s.barrier >= m.spot) {
    throw DomainError("down-and-out: barrier must lie in (0, S_0)");
  }
  const double T = s.maturity;
  const double nu = m.rate - m.dividend - 0.5 * vol * vol;
  const double image = s.barrier * s.barrier / m.spot;
  const double reflect = std::pow(s.barrier / m.spot, 2.0 * nu / (vol * vol));
  const double H = std::max(s.strike, s.barrier);
  return gap_call(m.spot, s.strike, H, T, vol, m) - reflect * gap_call(image, s.strike, H, T, vol, m);
}

// (N(-d1) - e^{-bT} N(-d3)) / b, evaluated as the average of its derivative along [0, b]
// so that the b -> 0 limit is exact.
double lookback_ratio(double b, double T, double vol) {
  const double sqrt_t = std::sqrt(T);
  auto derivative = [&](double c) {
    const double d3 = (0.5 * vol * vol - c) * sqrt_t / vol;
    return std::exp(-c * T) * (T * normal_cdf(-d3) - 2.0 * normal_pdf(d3) * sqrt_t / vol);
  };
  static const auto rule = gauss_legendre_rule(8, 0.0, 1.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * derivative(rule.nodes[k] * b);
  return acc;
}

double lookback(const Lookback& s, const MarketParams& m, double vol) {
  const double T = s.maturity;
  const double b = m.rate - m.dividend;
  const double base = call(m.spot, m.spot, T, vol, m);
  const double scale = m.spot * std::exp(-m.dividend * T) * vol * vol / 2.0;
  if (std::abs(b) < 1e-6) return base - scale * lookback_ratio(b, T, vol);
  const double sqrt_t = std::sqrt(T);
  const double d1 = (b + 0.5 * vol * vol) * T / (vol * sqrt_t);
  const double d3 = d1 - 2.0 * b * sqrt_t / vol;
  return base - scale / b * (normal_cdf(-d1) - std::exp(-b * T) * normal_cdf(-d3));
}

}  // namespace

double exotic_maturity(const ExoticSpec& spec) {
  return std::visit([](const auto& s) { return s.maturity; }, spec);
}

double exotic_bs_price(const ExoticSpec& spec, const MarketParams& market, double vol) {
  if (!(market.spot > 0.0) || !(vol > 0.0)) throw DomainError("exotic_bs_price: spot and vol must be positive");
  if (!(exotic_maturity(spec) > 0.0)) throw DomainError("exotic_bs_price: maturity must be positive");
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ForwardStart>) {
          if (s.start < 0.0 || s.start >= s.maturity) throw DomainError("forward start: need 0 <= tau < T");
          if (!s.relative) return call(market.spot, s.strike, s.maturity, vol, market);
          return std::exp(-market.dividend * s.start) *
                 call(market.spot, s.strike * market.spot, s.maturity - s.start, vol, market);
        } else if constexpr (std::is_same_v<S, DownAndOut>) {
          return down_and_out(s, market, vol);
        } else {
          return lookback(s, market, vol);
        }
      },
      spec);
}

ExoticVol exotic_implied_vol(double price, const ExoticSpec& spec, const MarketParams& market, double lo, double hi) {
  if (!std::isfinite(price) || !(lo > 0.0) || !(hi > lo)) throw InversionError("exotic_implied_vol: invalid inputs");
  constexpr int kGrid = 400;
  std::vector<double> grid(kGrid + 1), val(kGrid + 1);
  const double ratio = std::log(hi / lo);
  for (int k = 0; k <= kGrid; ++k) {
    grid[static_cast<std::size_t>(k)] = k == kGrid ? hi : lo * std::exp(ratio * k / kGrid);
    val[static_cast<std::size_t>(k)] = exotic_bs_price(spec, market, grid[static_cast<std::size_t>(k)]) - price;
  }
  ExoticVol out;
  int first = -1;
  for (int k = 0; k < kGrid; ++k) {
    const double a = val[static_cast<std::size_t>(k)], b = val[static_cast<std::size_t>(k + 1)];
    const bool change = (a == 0.0 && (k == 0 || val[static_cast<std::size_t>(k - 1)] != 0.0)) || (a < 0.0 && b > 0.0) ||
                        (a > 0.0 && b < 0.0);
    if (change) {
      ++out.sign_changes;
      if (first < 0) first = k;
    }
  }
  if (val[kGrid] == 0.0 && val[kGrid - 1] != 0.0) {
    ++out.sign_changes;
    if (first < 0) first = kGrid;
  }
  if (first < 0) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "exotic_implied_vol: price " << price << " not attained on [" << lo << ", " << hi << "]";
    throw InversionError(msg.str());
  }
  out.multiple_roots = out.sign_changes > 1;
  if (val[static_cast<std::size_t>(first)] == 0.0) {
    out.vol = grid[static_cast<std::size_t>(first)];
    return out;
  }
  double a = grid[static_cast<std::size_t>(first)], b = grid[static_cast<std::size_t>(first + 1)];
  double fa = val[static_cast<std::size_t>(first)];
  for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = exotic_bs_price(spec, market, m) - price;
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  out.vol = 0.5 * (a + b);
  return out;
}

}  // namespace wcm
