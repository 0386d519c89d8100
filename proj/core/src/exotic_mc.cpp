#include "wcm/exotic_mc.hpp"

#include <algorithm>
#include <cmath>

#include "wcm/errors.hpp"
#include "wcm/parallel.hpp"

namespace wcm {

std::vector<double> monitoring_grid(double maturity, int steps_per_unit, std::vector<double> extra) {
  if (!(maturity > 0.0) || steps_per_unit < 1) throw ConfigError("monitoring_grid: bad maturity or resolution");
  const int n = std::max(1, static_cast<int>(std::ceil(maturity * steps_per_unit - 1e-9)));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n) + extra.size());
  for (int k = 1; k <= n; ++k) grid.push_back(k == n ? maturity : maturity * k / n);
  for (double t : extra) {
    if (t > 0.0 && t <= maturity) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double t : grid) {
    if (out.empty() || t - out.back() > 1e-12) {
      out.push_back(t);
    } else {
      out.back() = std::max(out.back(), t);
    }
  }
  return out;
}

namespace {

std::size_t find_time(const PathGrid& paths, double t) {
  for (std::size_t k = 0; k < paths.times.size(); ++k) {
    if (std::abs(paths.times[k] - t) <= 1e-12) return k;
  }
  throw ConfigError("exotic_mc_price: time " + std::to_string(t) + " is not on the path grid");
}

}  // namespace

PriceEstimate exotic_mc_price(const PathGrid& paths, double s0, const ExoticSpec& spec, double rate) {
  if (paths.n_paths == 0) throw ShapeError("exotic_mc_price: no paths");
  const double T = exotic_maturity(spec);
  const std::size_t iT = find_time(paths, T);
  std::size_t i_tau = 0;
  bool tau_at_zero = false;
  if (const auto* fs = std::get_if<ForwardStart>(&spec)) {
    tau_at_zero = fs->start == 0.0;
    if (!tau_at_zero && fs->relative) i_tau = find_time(paths, fs->start);
  }
  auto payoff = [&](std::span<const double> s) -> double {
    return std::visit(
        [&](const auto& x) -> double {
          using S = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<S, ForwardStart>) {
            if (!x.relative) return std::max(s[iT] - x.strike, 0.0);
            const double ref = tau_at_zero ? s0 : s[i_tau];
            return std::max(s[iT] - x.strike * ref, 0.0);
          } else if constexpr (std::is_same_v<S, DownAndOut>) {
            double m = s0;
            for (std::size_t k = 0; k <= iT; ++k) m = std::min(m, s[k]);
            return m > x.barrier ? std::max(s[iT] - x.strike, 0.0) : 0.0;
          } else {
            double m = s0;
            for (std::size_t k = 0; k <= iT; ++k) m = std::min(m, s[k]);
            return std::max(s[iT] - m, 0.0);
          }
        },
        spec);
  };
  const std::size_t n = paths.n_paths;
  const std::size_t chunks = chunk_count(n, kReductionChunk);
  std::vector<std::array<double, 2>> sums(chunks);
  const double shift = payoff(paths.path(0));
  parallel_chunks(n, kReductionChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    double s = 0.0, ss = 0.0;
    for (std::size_t p = begin; p < end; ++p) {
      const double y = payoff(paths.path(p)) - shift;
      s += y;
      ss += y * y;
    }
    sums[c] = {s, ss};
  });
  double s = 0.0, ss = 0.0;
  for (const auto& c : sums) {
    s += c[0];
    ss += c[1];
  }
  const double mean = s / static_cast<double>(n);
  const double var = n > 1 ? std::max(0.0, (ss - s * mean) / static_cast<double>(n - 1)) : 0.0;
  const double df = std::exp(-rate * T);
  return {df * (shift + mean), df * std::sqrt(var / static_cast<double>(n))};
}

}  // namespace wcm
