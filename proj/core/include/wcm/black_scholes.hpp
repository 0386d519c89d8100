#pragma once

#include "wcm/quotes.hpp"

namespace wcm {

/// Black-Scholes inputs with continuous rate r and dividend yield q.
struct BsInputs {
  double spot = 0.0;
  double strike = 0.0;
  double maturity = 0.0;
  double vol = 0.0;
  double rate = 0.0;
  double dividend = 0.0;
};

double bs_call(const BsInputs& in);
double bs_put(const BsInputs& in);
double bs_vega(const BsInputs& in);

/// Black forward form: DF * E[(F e^{sigma W_T - sigma^2 T / 2} - K)_+].
double black_price(double forward, double strike, double maturity, double vol, double discount_factor,
                   OptionType type = OptionType::Call);
double black_vega(double forward, double strike, double maturity, double vol, double discount_factor);

inline constexpr double kVolMin = 1e-4;
inline constexpr double kVolMax = 5.0;

struct ImpliedVol {
  double vol = 0.0;
  bool at_lower_bound = false;  // price at or below the sigma_min price
  bool at_upper_bound = false;  // price at or above the sigma_max price
  int iterations = 0;
};

/// Newton on vega with a bisection fallback inside [kVolMin, kVolMax]; converges to
/// |price(sigma) - target| < 1e-10 * forward. Prices outside the no-arbitrage bounds throw
/// InversionError; prices inside the bounds but beyond the bracket return the bracket end
/// with its flag set.
ImpliedVol implied_vol_black(double price, double forward, double strike, double maturity, double discount_factor,
                             OptionType type = OptionType::Call);

ImpliedVol implied_vol(double price, double spot, double strike, double maturity, double rate = 0.0,
                       double dividend = 0.0, OptionType type = OptionType::Call);

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

}  // namespace wcm
