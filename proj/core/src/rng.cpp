#include "wcm/rng.hpp"

#include <cmath>
#include <numbers>

namespace wcm {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// Uniform in (0, 1) from 64 random bits; never returns 0 so log() is safe.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void BrownianDriver::normals(std::uint64_t path, std::span<double> out, std::uint64_t first) const noexcept {
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  // Each Philox block yields two uniforms, hence one Box-Muller pair: normals 2b and 2b+1.
  std::size_t k = 0;
  std::uint64_t idx = first;
  while (k < out.size()) {
    const std::uint64_t b = idx / 2;
    const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(path),
                                     static_cast<std::uint32_t>(path >> 32),
                                     stream ^ (static_cast<std::uint32_t>(b >> 32) << 24)};
    const auto r = Philox4x32::block(ctr, key);
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    if (idx % 2 == 0) {
      out[k++] = radius * std::cos(angle);
      ++idx;
      if (k == out.size()) break;
    }
    out[k++] = radius * std::sin(angle);
    ++idx;
  }
}

}  // namespace wcm
