#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace wcm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless: the
/// output block is a pure function of (counter, key).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// Gaussian source for simulated Brownian paths. Every draw is addressed by
/// (seed, stream, path, index), so any path can be regenerated on its own and the
/// result does not depend on how paths are split across threads.
struct BrownianDriver {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  /// Fine-grid resolution for bases that need Ito sums (Legendre), per unit time.
  int fine_steps_per_unit = 2048;

  /// Fills `out` with standard normals number `first`, first+1, ... of path `path`.
  void normals(std::uint64_t path, std::span<double> out, std::uint64_t first = 0) const noexcept;

  BrownianDriver with_stream(std::uint32_t s) const noexcept {
    BrownianDriver d = *this;
    d.stream = s;
    return d;
  }
};

}  // namespace wcm
