#pragma once

#include <vector>

#include "wcm/exotic_bs.hpp"
#include "wcm/model.hpp"
#include "wcm/pricing.hpp"

namespace wcm {

/// Uniform monitoring grid on (0, T] with `steps_per_unit` points per unit time, merged with
/// `extra` times inside (0, T].
std::vector<double> monitoring_grid(double maturity, int steps_per_unit = 512, std::vector<double> extra = {});

/// Monte Carlo payoff mean over simulated paths; the running minimum includes S_0 at t = 0 and
/// every grid time up to T. Payoffs are discounted with exp(-rate T). Throws ConfigError when
/// tau or T is not a grid time.
PriceEstimate exotic_mc_price(const PathGrid& paths, double s0, const ExoticSpec& spec, double rate = 0.0);

}  // namespace wcm
