#include "wcm/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wcm/errors.hpp"
#include "wcm/parallel.hpp"

namespace wcm {

namespace {

void check_times(const BasisSpec& spec, std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || times[k] > spec.horizon()) {
      throw DomainError("sample_integrals: time " + std::to_string(times[k]) + " outside [0, horizon]");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw ConfigError("sample_integrals: times must be strictly increasing");
    }
  }
}

// One requested time strictly inside a cell, in cell-normalized coordinates.
struct BridgePoint {
  int cell;
  double x;          // (t - s_cell) / delta_cell in (0, 1)
  std::size_t time;  // index into the requested times
};

IntegralSamples sample_piecewise(const BasisSpec& spec, int d, const BrownianDriver& driver,
                                 std::span<const double> times, std::size_t n_paths) {
  const int M = spec.size();
  const auto grid = spec.grid();
  const int width = M * d;

  // For each time: the cell it falls in and whether it sits on the cell's right end.
  std::vector<int> cell_of(times.size(), -1);
  std::vector<BridgePoint> bridge;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] == 0.0) continue;
    const int u = spec.locate_cell(times[k]);
    cell_of[k] = u;
    const double lo = grid[static_cast<std::size_t>(u)];
    const double hi = grid[static_cast<std::size_t>(u + 1)];
    if (times[k] < hi) bridge.push_back({u, (times[k] - lo) / (hi - lo), k});
  }

  IntegralSamples out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.width = width;
  out.values.assign(times.size(), std::vector<double>(n_paths * static_cast<std::size_t>(width), 0.0));

  const std::size_t n_bridge = bridge.size();
  parallel_chunks(n_paths, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> z(static_cast<std::size_t>(width));
    std::vector<double> extra(n_bridge * static_cast<std::size_t>(d));
    // bridge_value[b * d + j]: normalized in-cell value Y at bridge point b.
    std::vector<double> bridge_value(n_bridge * static_cast<std::size_t>(d));
    for (std::size_t p = begin; p < end; ++p) {
      driver.normals(p, z, 0);
      if (n_bridge > 0) driver.normals(p, extra, static_cast<std::uint64_t>(width));
      // Bridge points are ordered by time, hence by (cell, x).
      for (int j = 0; j < d; ++j) {
        int cur_cell = -1;
        double xa = 0.0, ya = 0.0;
        for (std::size_t b = 0; b < n_bridge; ++b) {
          const auto& bp = bridge[b];
          if (bp.cell != cur_cell) {
            cur_cell = bp.cell;
            xa = 0.0;
            ya = 0.0;
          }
          const double zend = z[static_cast<std::size_t>(j * M + bp.cell)];
          const double frac = (bp.x - xa) / (1.0 - xa);
          const double mean = ya + frac * (zend - ya);
          const double var = (bp.x - xa) * (1.0 - bp.x) / (1.0 - xa);
          const double y = mean + std::sqrt(var) * extra[b * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
          bridge_value[b * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = y;
          xa = bp.x;
          ya = y;
        }
      }
      std::size_t b_cursor = 0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        const int u = cell_of[k];
        if (u < 0) continue;  // t = 0: all zeros
        double* row = out.values[k].data() + p * static_cast<std::size_t>(width);
        const bool interior = b_cursor < n_bridge && bridge[b_cursor].time == k;
        for (int j = 0; j < d; ++j) {
          for (int i = 0; i < u; ++i) row[j * M + i] = z[static_cast<std::size_t>(j * M + i)];
          row[j * M + u] = interior ? bridge_value[b_cursor * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)]
                                    : z[static_cast<std::size_t>(j * M + u)];
        }
        if (interior) ++b_cursor;
      }
    }
  });
  return out;
}

IntegralSamples sample_fine_grid(const BasisSpec& spec, int d, const BrownianDriver& driver,
                                 std::span<const double> times, std::size_t n_paths) {
  const int M = spec.size();
  const int width = M * d;
  const double T = spec.horizon();
  if (driver.fine_steps_per_unit < 1) throw ConfigError("sample_integrals: fine_steps_per_unit must be >= 1");
  const auto n_fine = static_cast<std::size_t>(std::ceil(driver.fine_steps_per_unit * T));
  const double step = T / static_cast<double>(n_fine);
  double prev = 0.0;
  for (double t : times) {
    if (t > prev && t - prev < step * (1.0 - 1e-9)) {
      throw ConfigError("sample_integrals: fine grid step " + std::to_string(step) +
                        " is coarser than the requested time spacing " + std::to_string(t - prev) +
                        "; raise fine_steps_per_unit");
    }
    if (t > 0.0) prev = t;
  }

  // Merged grid up to the last requested time; `record[k]` lists requested times at node k.
  const double t_last = times.empty() ? 0.0 : times.back();
  std::vector<double> nodes{0.0};
  for (std::size_t k = 1; k <= n_fine; ++k) {
    const double s = T * static_cast<double>(k) / static_cast<double>(n_fine);
    if (s >= t_last) break;
    nodes.push_back(s);
  }
  for (double t : times) nodes.push_back(t);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [](double a, double b) { return std::abs(a - b) <= 1e-14; }),
              nodes.end());
  std::vector<std::size_t> record_node(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), times[k] - 1e-14);
    record_node[k] = static_cast<std::size_t>(it - nodes.begin());
  }
  const std::size_t n_seg = nodes.size() - 1;
  // Left-point basis values per segment times sqrt(segment length).
  std::vector<double> scaled_h(n_seg * static_cast<std::size_t>(M));
  for (std::size_t s = 0; s < n_seg; ++s) {
    const double dt = nodes[s + 1] - nodes[s];
    for (int i = 0; i < M; ++i) scaled_h[s * static_cast<std::size_t>(M) + static_cast<std::size_t>(i)] =
        basis_eval(spec, i, nodes[s]) * std::sqrt(dt);
  }

  IntegralSamples out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.width = width;
  out.values.assign(times.size(), std::vector<double>(n_paths * static_cast<std::size_t>(width), 0.0));

  parallel_chunks(n_paths, 256, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> z(n_seg * static_cast<std::size_t>(d));
    std::vector<double> acc(static_cast<std::size_t>(width));
    for (std::size_t p = begin; p < end; ++p) {
      driver.normals(p, z, 0);
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t next_record = 0;
      auto flush = [&](std::size_t node) {
        while (next_record < times.size() && record_node[next_record] == node) {
          std::copy(acc.begin(), acc.end(), out.values[next_record].begin() + static_cast<std::ptrdiff_t>(p * static_cast<std::size_t>(width)));
          ++next_record;
        }
      };
      flush(0);
      for (std::size_t s = 0; s < n_seg; ++s) {
        const double* hs = scaled_h.data() + s * static_cast<std::size_t>(M);
        for (int j = 0; j < d; ++j) {
          const double dz = z[s * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
          double* a = acc.data() + j * M;
          for (int i = 0; i < M; ++i) a[i] += hs[i] * dz;
        }
        flush(s + 1);
      }
    }
  });
  return out;
}

}  // namespace

IntegralSamples sample_integrals(const BasisSpec& spec, int components, const BrownianDriver& driver,
                                 std::span<const double> times, std::size_t n_paths) {
  if (components < 1) throw DomainError("sample_integrals: components must be >= 1");
  if (n_paths < 1) throw DomainError("sample_integrals: n_paths must be >= 1");
  check_times(spec, times);
  if (spec.is_piecewise()) return sample_piecewise(spec, components, driver, times, n_paths);
  return sample_fine_grid(spec, components, driver, times, n_paths);
}

}  // namespace wcm
