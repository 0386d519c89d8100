#pragma once

#include <span>
#include <vector>

#include "wcm/basis.hpp"
#include "wcm/rng.hpp"

namespace wcm {

/// Samples of I^t = (int_0^t h_i dB^j)_{i,j} for a set of times, jointly consistent per path.
/// Rows are paths; each row has M*d entries in the canonical (j*M + i) layout.
struct IntegralSamples {
  std::vector<double> times;
  std::size_t n_paths = 0;
  int width = 0;
  std::vector<std::vector<double>> values;  // one n_paths x width block per time

  std::span<const double> row(std::size_t time_index, std::size_t path) const {
    return std::span<const double>(values[time_index]).subspan(path * static_cast<std::size_t>(width),
                                                               static_cast<std::size_t>(width));
  }
};

/// Simulates I^t at the sorted `times` (each in [0, horizon]) for `n_paths` paths with
/// `components` Brownian components.
///
/// Piecewise-constant basis: exact. Normal number j*M + i of a path is the standardized
/// full-cell increment of cell i, component j, so I^horizon does not depend on which
/// intermediate times are requested; times inside a cell are filled by Brownian bridges.
/// Legendre basis: left-point Ito sums on a fine grid of driver.fine_steps_per_unit steps per
/// unit time merged with the requested times. Throws ConfigError if that grid is coarser
/// than the smallest spacing of the requested times.
IntegralSamples sample_integrals(const BasisSpec& spec, int components, const BrownianDriver& driver,
                                 std::span<const double> times, std::size_t n_paths);

}  // namespace wcm
