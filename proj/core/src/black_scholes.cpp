#include "wcm/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wcm/errors.hpp"

namespace wcm {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double black_price(double forward, double strike, double maturity, double vol, double discount_factor,
                   OptionType type) {
  const double sd = vol * std::sqrt(std::max(maturity, 0.0));
  double call;
  if (!(sd > 0.0) || strike <= 0.0) {
    call = std::max(forward - strike, 0.0);
  } else {
    const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    call = forward * normal_cdf(d1) - strike * normal_cdf(d2);
  }
  if (type == OptionType::Put) {
    // Direct form keeps precision for deep out-of-the-money puts.
    if (!(sd > 0.0) || strike <= 0.0) return discount_factor * std::max(strike - forward, 0.0);
    const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    return discount_factor * (strike * normal_cdf(-d2) - forward * normal_cdf(-d1));
  }
  return discount_factor * call;
}

double black_vega(double forward, double strike, double maturity, double vol, double discount_factor) {
  const double sqrt_t = std::sqrt(std::max(maturity, 0.0));
  const double sd = vol * sqrt_t;
  if (!(sd > 0.0) || strike <= 0.0) return 0.0;
  const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
  return discount_factor * forward * normal_pdf(d1) * sqrt_t;
}

namespace {

double forward_of(const BsInputs& in) { return in.spot * std::exp((in.rate - in.dividend) * in.maturity); }
double df_of(const BsInputs& in) { return std::exp(-in.rate * in.maturity); }

}  // namespace

double bs_call(const BsInputs& in) {
  return black_price(forward_of(in), in.strike, in.maturity, in.vol, df_of(in), OptionType::Call);
}

double bs_put(const BsInputs& in) {
  return black_price(forward_of(in), in.strike, in.maturity, in.vol, df_of(in), OptionType::Put);
}

double bs_vega(const BsInputs& in) { return black_vega(forward_of(in), in.strike, in.maturity, in.vol, df_of(in)); }

ImpliedVol implied_vol_black(double price, double forward, double strike, double maturity, double discount_factor,
                             OptionType type) {
  if (!(forward > 0.0) || !(strike > 0.0) || !(maturity > 0.0) || !(discount_factor > 0.0) || !std::isfinite(price)) {
    throw InversionError("implied_vol: invalid inputs");
  }
  // Work with the undiscounted call price.
  double target = price / discount_factor;
  if (type == OptionType::Put) target += forward - strike;
  const double lower = std::max(forward - strike, 0.0);
  const double upper = forward;
  const double tol = 1e-10 * forward;
  if (target < lower - tol || target > upper + tol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "implied_vol: price " << price << " outside no-arbitrage bounds [" << discount_factor * lower << ", "
        << discount_factor * upper << "] (call-equivalent, K = " << strike << ", T = " << maturity << ")";
    throw InversionError(msg.str());
  }
  auto f = [&](double s) { return black_price(forward, strike, maturity, s, 1.0) - target; };
  ImpliedVol out;
  const double f_lo = f(kVolMin);
  if (f_lo >= -tol) {
    out.vol = kVolMin;
    out.at_lower_bound = true;
    return out;
  }
  const double f_hi = f(kVolMax);
  if (f_hi <= tol) {
    out.vol = kVolMax;
    out.at_upper_bound = true;
    return out;
  }
  double lo = kVolMin, hi = kVolMax;
  // Start near the inflection point of the price in sigma, where Newton is globally convergent.
  double s = std::sqrt(2.0 * std::abs(std::log(forward / strike)) / maturity);
  s = std::clamp(s, 0.05, 1.0);
  for (int it = 1; it <= 200; ++it) {
    out.iterations = it;
    const double v = f(s);
    if (v == 0.0) break;
    if (v < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    const double vega = black_vega(forward, strike, maturity, s, 1.0);
    double next = vega > 0.0 ? s - v / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - s) < 1e-14 * s || hi - lo < 1e-15;
    s = next;
    if (done) break;
  }
  out.vol = s;
  return out;
}

ImpliedVol implied_vol(double price, double spot, double strike, double maturity, double rate, double dividend,
                       OptionType type) {
  const double forward = spot * std::exp((rate - dividend) * maturity);
  return implied_vol_black(price, forward, strike, maturity, std::exp(-rate * maturity), type);
}

}  // namespace wcm
