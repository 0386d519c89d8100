#include "wcm/heston.hpp"

#include <algorithm>
#include <cmath>

#include "wcm/errors.hpp"
#include "wcm/parallel.hpp"

namespace wcm {

using cd = std::complex<double>;

void HestonParams::validate() const {
  if (!(s0 > 0.0)) throw DomainError("heston: s0 must be positive");
  if (!(kappa > 0.0) || !(vbar > 0.0) || !(eps > 0.0)) throw DomainError("heston: kappa, vbar, eps must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("heston: rho must lie in (-1, 1)");
  if (!(v0 >= 0.0)) throw DomainError("heston: v0 must be nonnegative");
  if (!std::isfinite(rate) || !std::isfinite(dividend)) throw DomainError("heston: rates must be finite");
}

MomentCondition heston_moment_condition(const HestonParams& p) noexcept {
  MomentCondition m;
  m.chi2 = 2.0 * p.rho * p.eps - p.kappa;
  m.delta2 = m.chi2 * m.chi2 - 2.0 * p.eps * p.eps;
  m.finite = m.delta2 >= 0.0 && m.chi2 < 0.0;
  return m;
}

bool heston_second_moment_finite(const HestonParams& p) noexcept { return heston_moment_condition(p).finite; }

namespace {

cd finish(cd w, double t, const HestonParams& p, cd a, cd b) {
  const cd drift = w * (std::log(p.s0) + (p.rate - p.dividend) * t);
  const cd v = std::exp(drift + a + b * p.v0);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericError("heston_cf: non-finite value");
  return v;
}

}  // namespace

cd heston_cf(cd u, double t, const HestonParams& p) {
  const cd w = cd(0.0, 1.0) * u;
  if (t == 0.0) return finish(w, t, p, 0.0, 0.0);
  const double e2 = p.eps * p.eps;
  const cd beta = p.kappa - p.rho * p.eps * w;
  const cd d = std::sqrt(beta * beta - e2 * (w * w - w));
  const cd g = (beta - d) / (beta + d);
  const cd e = std::exp(-d * t);
  const cd b = (beta - d) / e2 * (1.0 - e) / (1.0 - g * e);
  const cd a = p.kappa * p.vbar / e2 * ((beta - d) * t - 2.0 * std::log((1.0 - g * e) / (1.0 - g)));
  return finish(w, t, p, a, b);
}

cd heston_cf_direct(cd u, double t, const HestonParams& p) {
  const cd w = cd(0.0, 1.0) * u;
  if (t == 0.0) return finish(w, t, p, 0.0, 0.0);
  const double e2 = p.eps * p.eps;
  const cd beta = w * p.rho * p.eps - p.kappa;
  const cd gamma = std::sqrt((p.kappa - w * p.rho * p.eps) * (p.kappa - w * p.rho * p.eps) - e2 * (w * w - w));
  const cd E = 1.0 - std::exp(-gamma * t);
  const cd a = -p.kappa * p.vbar * ((gamma + beta) / e2 * t + 2.0 / e2 * std::log(1.0 - (gamma + beta) / (2.0 * gamma) * E));
  const cd b = (w * w - w) * E / (2.0 * gamma - (gamma + beta) * E);
  return finish(w, t, p, a, b);
}

double heston_mean_variance(const HestonParams& p, double t) noexcept {
  return p.vbar + (p.v0 - p.vbar) * std::exp(-p.kappa * t);
}

PathGrid heston_simulate(const HestonParams& p, std::span<const double> times, std::size_t n_paths,
                         const BrownianDriver& driver, int steps_per_unit) {
  p.validate();
  if (steps_per_unit < 1) throw ConfigError("heston_simulate: steps_per_unit must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1]))) {
      throw DomainError("heston_simulate: times must be positive and strictly increasing");
    }
  }
  // Steps between record times: each interval is split into equal steps no longer than 1/steps_per_unit.
  std::vector<double> dt;
  std::vector<std::size_t> record_after;  // step count after which each record time is reached
  double prev = 0.0;
  for (double t : times) {
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((t - prev) * steps_per_unit - 1e-9)));
    for (std::size_t k = 0; k < n; ++k) dt.push_back((t - prev) / static_cast<double>(n));
    record_after.push_back(dt.size());
    prev = t;
  }
  PathGrid out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.values.assign(n_paths * times.size(), 0.0);
  const double rho_bar = std::sqrt(1.0 - p.rho * p.rho);
  const double mu = p.rate - p.dividend;
  const double x0 = std::log(p.s0);
  parallel_chunks(n_paths, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> z(2 * dt.size());
    for (std::size_t path = begin; path < end; ++path) {
      driver.normals(path, z);
      double x = x0, v = p.v0;
      std::size_t rec = 0;
      for (std::size_t k = 0; k < dt.size(); ++k) {
        const double vp = std::max(v, 0.0);
        const double sq = std::sqrt(vp * dt[k]);
        const double z_v = z[2 * k];
        const double z_s = p.rho * z_v + rho_bar * z[2 * k + 1];
        x += (mu - 0.5 * vp) * dt[k] + sq * z_s;
        v += p.kappa * (p.vbar - vp) * dt[k] + p.eps * sq * z_v;
        while (rec < record_after.size() && record_after[rec] == k + 1) {
          out.values[path * times.size() + rec] = std::exp(x);
          ++rec;
        }
      }
    }
  });
  return out;
}

}  // namespace wcm
