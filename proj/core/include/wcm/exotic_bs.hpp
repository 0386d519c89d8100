#pragma once

#include <variant>

namespace wcm {

/// Call starting at tau with strike fixed then. With `relative` the payoff is
/// (S_T - k S_tau)_+ with k = `strike`; otherwise `strike` is an absolute level K paid as
/// (S_T - K)_+ at T.
struct ForwardStart {
  double start = 0.0;
  double maturity = 0.0;
  double strike = 1.0;
  bool relative = true;
};

/// (S_T - K)_+ 1{min_{t <= T} S_t > L}.
struct DownAndOut {
  double maturity = 0.0;
  double strike = 0.0;
  double barrier = 0.0;
};

/// Floating-strike lookback call (S_T - min_{t <= T} S_t)_+.
struct Lookback {
  double maturity = 0.0;
};

using ExoticSpec = std::variant<ForwardStart, DownAndOut, Lookback>;

struct MarketParams {
  double spot = 0.0;
  double rate = 0.0;
  double dividend = 0.0;
};

double exotic_maturity(const ExoticSpec& spec);

/// Black-Scholes price with continuous monitoring. DownAndOut requires L < S_0.
double exotic_bs_price(const ExoticSpec& spec, const MarketParams& market, double vol);

struct ExoticVol {
  double vol = 0.0;
  int sign_changes = 0;
  bool multiple_roots = false;
};

/// Scans [lo, hi] for sign changes of price(sigma) - target and bisects the smallest bracket.
/// More than one sign change sets `multiple_roots`. Throws InversionError when there is none.
ExoticVol exotic_implied_vol(double price, const ExoticSpec& spec, const MarketParams& market, double lo = 1e-4,
                             double hi = 5.0);

}  // namespace wcm
