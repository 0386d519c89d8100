#include "wcm/hermite.hpp"

#include <cmath>
#include <string>

#include "wcm/errors.hpp"

namespace wcm {

void hermite_fill(double x, std::span<double> out) noexcept {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    out[n + 1] = (x * out[n] - out[n - 1]) / static_cast<double>(n + 1);
  }
}

std::vector<double> hermite_upto(int n_max, double x) {
  if (n_max < 0) throw DomainError("hermite_upto: n_max must be >= 0, got " + std::to_string(n_max));
  if (!std::isfinite(x)) throw DomainError("hermite_upto: x must be finite");
  std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
  hermite_fill(x, h);
  return h;
}

double hermite(int n, double x) {
  if (n < 0) return 0.0;  // H_{-1} == 0
  return hermite_upto(n, x).back();
}

}  // namespace wcm
