#include "wcm/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "wcm/errors.hpp"
#include "wcm/hermite.hpp"
#include "wcm/parallel.hpp"
#include "wcm/quadrature.hpp"

namespace wcm {

PricingMethod PricingMethod::monte_carlo(std::size_t paths, int cv_degree, std::size_t cv_samples) {
  PricingMethod m;
  m.kind = Kind::MonteCarlo;
  m.n_paths = paths;
  m.cv_degree = cv_degree;
  m.cv_sample_size = cv_samples;
  return m;
}

PricingMethod PricingMethod::quadrature(int nodes, int cap) {
  PricingMethod m;
  m.kind = Kind::Quadrature;
  m.n_nodes = nodes;
  m.dimension_cap = cap;
  return m;
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684759;
// Beyond |x| = 38 the standard normal density underflows to zero in double precision.
constexpr double kRootRange = 38.0;

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// P(a < Z < b) without cancellation in either tail.
double normal_mass(double a, double b) noexcept {
  if (a >= 0.0) return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
  return 1.0 - 0.5 * std::erfc(b / std::numbers::sqrt2) - 0.5 * std::erfc(-a / std::numbers::sqrt2);
}

// Adds int_a^b x^m phi(x) dx for m = 0..out.size()-1, using
//   int_a^b x^m phi = a^{m-1} phi(a) - b^{m-1} phi(b) + (m - 1) int_a^b x^{m-2} phi.
void add_gaussian_moments(double a, double b, std::span<double> out) {
  const double pa = std::isinf(a) ? 0.0 : normal_pdf(a);
  const double pb = std::isinf(b) ? 0.0 : normal_pdf(b);
  double m_prev2 = 0.0, m_prev1 = 0.0;
  double pow_a = 1.0, pow_b = 1.0;  // a^{m-1}, b^{m-1}
  for (std::size_t m = 0; m < out.size(); ++m) {
    double v;
    if (m == 0) {
      v = normal_mass(a, b);
    } else {
      if (m >= 2) {
        pow_a *= std::isinf(a) ? 0.0 : a;
        pow_b *= std::isinf(b) ? 0.0 : b;
      }
      v = pow_a * pa - pow_b * pb + static_cast<double>(m - 1) * m_prev2;
    }
    out[m] += v;
    m_prev2 = m_prev1;
    m_prev1 = v;
  }
}

double poly_eval(std::span<const double> c, double x) noexcept {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
  return v;
}

// Real roots of the monomial polynomial c in (lo, hi), ascending. Roots of the derivative split
// the range into monotone pieces, each bracketed and bisected to full precision.
void real_roots(std::span<const double> coeffs, double lo, double hi, std::vector<double>& out) {
  std::size_t n = coeffs.size();
  while (n > 1 && coeffs[n - 1] == 0.0) --n;
  const auto c = coeffs.first(n);
  const std::size_t deg = n - 1;
  if (deg == 0) return;
  if (deg == 1) {
    const double r = -c[0] / c[1];
    if (r > lo && r < hi) out.push_back(r);
    return;
  }
  std::vector<double> dc(deg);
  for (std::size_t k = 0; k < deg; ++k) dc[k] = static_cast<double>(k + 1) * c[k + 1];
  std::vector<double> pts;
  pts.push_back(lo);
  real_roots(dc, lo, hi, pts);
  pts.push_back(hi);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double a = pts[k], b = pts[k + 1];
    double fa = poly_eval(c, a);
    const double fb = poly_eval(c, b);
    if (fa == 0.0) {
      if (a > lo && (out.empty() || out.back() != a)) out.push_back(a);
      continue;
    }
    if (fb == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m <= a || m >= b) break;
      const double fm = poly_eval(c, m);
      if (fm == 0.0) {
        a = b = m;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.push_back(0.5 * (a + b));
  }
}

// For the monomial polynomial c (constant term already shifted by -K), fills
// moments[m] = int_{c(x) > 0} x^m phi(x) dx.
void positive_set_moments(std::span<const double> c, std::vector<double>& roots, std::span<double> moments) {
  roots.clear();
  real_roots(c, -kRootRange, kRootRange, roots);
  std::fill(moments.begin(), moments.end(), 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  double a = -inf;
  for (std::size_t k = 0; k <= roots.size(); ++k) {
    const double b = k < roots.size() ? roots[k] : inf;
    double probe;
    if (std::isinf(a) && std::isinf(b)) {
      probe = 0.0;
    } else if (std::isinf(a)) {
      probe = b - 1.0;
    } else if (std::isinf(b)) {
      probe = a + 1.0;
    } else {
      probe = 0.5 * (a + b);
    }
    if (poly_eval(c, probe) > 0.0) add_gaussian_moments(a, b, moments);
    a = b;
  }
}

// Inverse Vandermonde matrix (row-major) mapping values at xs to monomial coefficients.
std::vector<double> vandermonde_inverse(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<double> a(n * n), inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = p;
      p *= xs[i];
    }
    inv[i * n + i] = 1.0;
  }
  // Gauss-Jordan with partial pivoting on [A | I] gives A^{-1}: coefficients = A^{-1} values.
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a[col * n + j], a[piv * n + j]);
      std::swap(inv[col * n + j], inv[piv * n + j]);
    }
    const double d = a[col * n + col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col * n + j] /= d;
      inv[col * n + j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[col * n + j];
        inv[r * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return inv;
}

struct ChunkMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
};

PriceEstimate finish_moments(const std::vector<ChunkMoments>& chunks, double shift) {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (const auto& c : chunks) {
    sum += c.sum;
    sum_sq += c.sum_sq;
    n += c.count;
  }
  PriceEstimate est;
  if (n == 0) return est;
  const double mean = sum / static_cast<double>(n);
  est.price = shift + mean;
  if (n > 1) {
    const double var = std::max(0.0, (sum_sq - sum * mean) / static_cast<double>(n - 1));
    est.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return est;
}

void check_block(const ChaosModel& model, const FeatureBlock& block) {
  if (block.cols != model.coefficient_count()) {
    throw ShapeError("feature block has " + std::to_string(block.cols) + " columns, model has " +
                     std::to_string(model.coefficient_count()) + " coefficients");
  }
  if (block.rows == 0) throw ShapeError("feature block is empty");
}

double row_value(const ChaosModel& model, const FeatureBlock& block, std::size_t r) {
  const double* f = block.data.data() + r * block.cols;
  const auto c = model.coefficients();
  double v = model.s0();
  for (std::size_t k = 0; k < block.cols; ++k) v += f[k] * c[k];
  return v;
}

}  // namespace

QuadratureBlock quadrature_block(const ChaosModel& model, double T, int n_nodes, int dimension_cap) {
  const auto& basis = model.basis();
  if (!basis.is_piecewise()) throw ConfigError("quadrature pricing requires a piecewise-constant basis");
  if (!(T > 0.0) || T > model.horizon()) throw DomainError("quadrature_block: maturity outside (0, horizon]");
  const int u = basis.locate_cell(T);
  const int d = model.components();
  const int M = model.basis_count();
  const int D = (u + 1) * d;
  if (D > dimension_cap) {
    throw ConfigError("quadrature pricing at T = " + std::to_string(T) + " needs " + std::to_string(D) +
                      " Gaussian dimensions, above the cap of " + std::to_string(dimension_cap));
  }
  const auto rule = gauss_hermite_rule(n_nodes);
  const double frac = (T - basis.grid()[static_cast<std::size_t>(u)]) / basis.width(u);
  const double sqrt_frac = std::sqrt(frac);
  const int P = model.order();

  // Local axis k <-> canonical entry j*M + i over the active cells i <= u.
  std::vector<int> entry_of_axis;
  std::vector<int> axis_of_entry(static_cast<std::size_t>(M * d), -1);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i <= u; ++i) {
      axis_of_entry[static_cast<std::size_t>(j * M + i)] = static_cast<int>(entry_of_axis.size());
      entry_of_axis.push_back(j * M + i);
    }
  }
  const auto Ds = static_cast<std::size_t>(D);

  // Sparse (axis, exponent) factors of every index alive at T.
  const auto indices = model.indices();
  const auto coef = model.coefficients();
  std::vector<std::vector<std::pair<int, int>>> nonzero(indices.size());
  std::vector<bool> alive(indices.size(), false);
  std::vector<double> g(Ds, 0.0);
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a].last_active_basis() > u) continue;
    alive[a] = true;
    const auto exps = indices[a].exponents();
    for (std::size_t e = 0; e < exps.size(); ++e) {
      if (exps[e] > 0) nonzero[a].emplace_back(axis_of_entry[e], exps[e]);
    }
    if (indices[a].order() == 1) {
      const int k = nonzero[a].front().first;
      const bool in_cell_u = entry_of_axis[static_cast<std::size_t>(k)] % M == u;
      g[static_cast<std::size_t>(k)] += coef[a] * (in_cell_u ? sqrt_frac : 1.0);
    }
  }

  // Householder reflection H with H e_{D-1} = g / |g|.
  double gnorm = 0.0;
  for (double v : g) gnorm += v * v;
  gnorm = std::sqrt(gnorm);
  std::vector<double> dir(Ds, 0.0);
  if (gnorm > 0.0) {
    for (std::size_t k = 0; k < Ds; ++k) dir[k] = g[k] / gnorm;
  } else {
    dir[Ds - 1] = 1.0;
  }
  std::vector<double> H(Ds * Ds, 0.0);
  for (std::size_t k = 0; k < Ds; ++k) H[k * Ds + k] = 1.0;
  {
    std::vector<double> v(dir);
    v[Ds - 1] -= 1.0;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    if (vv > 1e-30) {
      for (std::size_t r = 0; r < Ds; ++r) {
        for (std::size_t c = 0; c < Ds; ++c) H[r * Ds + c] -= 2.0 * v[r] * v[c] / vv;
      }
    }
  }

  QuadratureBlock qb;
  qb.maturity = T;
  qb.n_nodes = n_nodes;
  qb.dimension = D;
  qb.cols = model.coefficient_count();
  qb.points = P + 1;
  qb.direction = dir;
  std::vector<double> xs(static_cast<std::size_t>(qb.points));
  for (int j = 0; j <= P; ++j) xs[static_cast<std::size_t>(j)] = P == 0 ? 0.0 : -1.0 + 2.0 * j / P;
  qb.interp = vandermonde_inverse(xs);
  qb.outer_count = 1;
  for (int k = 0; k + 1 < D; ++k) qb.outer_count *= static_cast<std::size_t>(n_nodes);
  qb.outer_weights.assign(qb.outer_count, 1.0);
  const std::size_t stride = static_cast<std::size_t>(qb.points) * qb.cols;
  qb.features.assign(qb.outer_count * stride, 0.0);

  // Per axis, entries of cell u carry the factor frac^{e/2}.
  std::vector<double> axis_scale(Ds, 1.0);
  for (std::size_t k = 0; k < Ds; ++k) {
    if (entry_of_axis[k] % M == u) axis_scale[k] = sqrt_frac;
  }

  parallel_chunks(qb.outer_count, 256, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> base(Ds), z(Ds);
    std::vector<double> table(Ds * static_cast<std::size_t>(P + 1));
    for (std::size_t o = begin; o < end; ++o) {
      std::size_t rem = o;
      double w = 1.0;
      std::fill(base.begin(), base.end(), 0.0);
      for (std::size_t k = 0; k + 1 < Ds; ++k) {
        const auto digit = rem % static_cast<std::size_t>(n_nodes);
        rem /= static_cast<std::size_t>(n_nodes);
        w *= rule.weights[digit];
        const double x = rule.nodes[digit];
        for (std::size_t r = 0; r < Ds; ++r) base[r] += H[r * Ds + k] * x;
      }
      qb.outer_weights[o] = w;
      for (int j = 0; j <= P; ++j) {
        for (std::size_t r = 0; r < Ds; ++r) z[r] = base[r] + xs[static_cast<std::size_t>(j)] * dir[r];
        for (std::size_t r = 0; r < Ds; ++r) {
          auto row = std::span<double>(table).subspan(r * static_cast<std::size_t>(P + 1), static_cast<std::size_t>(P + 1));
          hermite_fill(z[r], row);
          double s = 1.0;
          for (int e = 1; e <= P; ++e) {
            s *= axis_scale[r];
            row[static_cast<std::size_t>(e)] *= s;
          }
        }
        double* f = qb.features.data() + o * stride + static_cast<std::size_t>(j) * qb.cols;
        for (std::size_t a = 0; a < qb.cols; ++a) {
          if (!alive[a]) continue;
          double v = 1.0;
          for (const auto& [k, e] : nonzero[a]) v *= table[static_cast<std::size_t>(k * (P + 1) + e)];
          f[a] = v;
        }
      }
    }
  });
  return qb;
}

double quad_call_price(const ChaosModel& model, const QuadratureBlock& block, double K, std::span<double> gradient) {
  if (block.cols != model.coefficient_count()) throw ShapeError("quadrature block does not match the model");
  if (!gradient.empty() && gradient.size() != block.cols) throw ShapeError("gradient length mismatch");
  const auto coef = model.coefficients();
  const std::size_t np = static_cast<std::size_t>(block.points);
  const std::size_t stride = np * block.cols;
  const std::size_t chunks = chunk_count(block.outer_count, 64);
  std::vector<double> partial(chunks, 0.0);
  std::vector<std::vector<double>> partial_grad(gradient.empty() ? 0 : chunks);
  parallel_chunks(block.outer_count, 64, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<double> vals(np), mono(np), moments(np), dual(np), roots;
    std::vector<double> g;
    if (!gradient.empty()) g.assign(block.cols, 0.0);
    double acc = 0.0;
    for (std::size_t o = begin; o < end; ++o) {
      const double* f = block.features.data() + o * stride;
      for (std::size_t j = 0; j < np; ++j) {
        double v = model.s0() - K;
        const double* fj = f + j * block.cols;
        for (std::size_t a = 0; a < block.cols; ++a) v += coef[a] * fj[a];
        vals[j] = v;
      }
      for (std::size_t m = 0; m < np; ++m) {
        double v = 0.0;
        for (std::size_t j = 0; j < np; ++j) v += block.interp[m * np + j] * vals[j];
        mono[m] = v;
      }
      positive_set_moments(mono, roots, moments);
      const double w = block.outer_weights[o];
      double line = 0.0;
      for (std::size_t m = 0; m < np; ++m) line += mono[m] * moments[m];
      acc += w * line;
      if (!g.empty()) {
        // d line / d vals_j = sum_m interp[m][j] moments[m].
        for (std::size_t j = 0; j < np; ++j) {
          double v = 0.0;
          for (std::size_t m = 0; m < np; ++m) v += block.interp[m * np + j] * moments[m];
          dual[j] = w * v;
        }
        for (std::size_t j = 0; j < np; ++j) {
          if (dual[j] == 0.0) continue;
          const double* fj = f + j * block.cols;
          for (std::size_t a = 0; a < block.cols; ++a) g[a] += dual[j] * fj[a];
        }
      }
    }
    partial[c] = acc;
    if (!g.empty()) partial_grad[c] = std::move(g);
  });
  double price = 0.0;
  for (double p : partial) price += p;
  if (!gradient.empty()) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (const auto& g : partial_grad) {
      for (std::size_t a = 0; a < block.cols; ++a) gradient[a] += g[a];
    }
  }
  return price;
}

double quad_call_price(const ChaosModel& model, double T, double K, int n_nodes, int dimension_cap) {
  return quad_call_price(model, quadrature_block(model, T, n_nodes, dimension_cap), K);
}

CvState estimate_cv(const ChaosModel& model, const FeatureBlock& block, double K, int degree) {
  check_block(model, block);
  if (degree < 0 || degree > 2) throw ConfigError("estimate_cv: degree must be 0, 1 or 2");
  if (degree == 2 && !model.basis().is_piecewise()) {
    throw ConfigError("estimate_cv: degree-2 control variate requires a piecewise-constant basis");
  }
  CvState cv;
  cv.tag = block.tag;
  cv.degree = degree;
  if (degree == 0) return cv;
  cv.second_moment = degree == 2 ? second_moment(model, block.maturity) : 0.0;

  const std::size_t n = block.rows;
  const std::size_t chunks = chunk_count(n, kReductionChunk);
  // Pass 1: means of (Y, X1, X2).
  std::vector<std::array<double, 3>> sums(chunks);
  parallel_chunks(n, kReductionChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::array<double, 3> s{0.0, 0.0, 0.0};
    for (std::size_t r = begin; r < end; ++r) {
      const double v = row_value(model, block, r);
      s[0] += std::max(v - K, 0.0);
      s[1] += v - model.s0();
      s[2] += v * v - cv.second_moment;
    }
    sums[c] = s;
  });
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  for (const auto& s : sums) {
    for (int k = 0; k < 3; ++k) mean[static_cast<std::size_t>(k)] += s[static_cast<std::size_t>(k)];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  // Pass 2: centred second moments (yy, y1, y2, 11, 12, 22).
  std::vector<std::array<double, 6>> cross(chunks);
  parallel_chunks(n, kReductionChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::array<double, 6> s{};
    for (std::size_t r = begin; r < end; ++r) {
      const double v = row_value(model, block, r);
      const double y = std::max(v - K, 0.0) - mean[0];
      const double x1 = v - model.s0() - mean[1];
      const double x2 = v * v - cv.second_moment - mean[2];
      s[0] += y * y;
      s[1] += y * x1;
      s[2] += y * x2;
      s[3] += x1 * x1;
      s[4] += x1 * x2;
      s[5] += x2 * x2;
    }
    cross[c] = s;
  });
  std::array<double, 6> cov{};
  for (const auto& s : cross) {
    for (std::size_t k = 0; k < 6; ++k) cov[k] += s[k];
  }
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (auto& v : cov) v /= denom;
  cv.var_y = cov[0];
  cv.sigma_yx = {cov[1], cov[2]};
  cv.sigma_x = {cov[3], cov[4], cov[4], cov[5]};

  const double scale = std::max(1.0, model.s0() * model.s0());
  if (degree == 2) {
    const double det = cov[3] * cov[5] - cov[4] * cov[4];
    if (cov[3] > 1e-14 * scale && cov[5] > 0.0 && det > 1e-10 * cov[3] * cov[5]) {
      cv.beta = {(cov[5] * cov[1] - cov[4] * cov[2]) / det, (cov[3] * cov[2] - cov[4] * cov[1]) / det};
      cv.r2 = cv.var_y > 0.0 ? (cv.beta[0] * cov[1] + cv.beta[1] * cov[2]) / cv.var_y : 0.0;
      return cv;
    }
    cv.degraded = true;
    cv.degree = 1;
  }
  if (cov[3] > 1e-14 * scale) {
    cv.beta = {cov[1] / cov[3], 0.0};
    cv.r2 = cv.var_y > 0.0 ? cov[1] * cov[1] / (cov[3] * cv.var_y) : 0.0;
    return cv;
  }
  cv.degraded = true;
  cv.degree = 0;
  cv.beta = {0.0, 0.0};
  cv.r2 = 0.0;
  return cv;
}

PriceEstimate mc_call_price(const ChaosModel& model, const FeatureBlock& block, double K, const CvState* cv) {
  return call_price_gradient(model, block, K, cv, {});
}

PriceEstimate call_price_gradient(const ChaosModel& model, const FeatureBlock& block, double K, const CvState* cv,
                                  std::span<double> gradient) {
  check_block(model, block);
  if (!gradient.empty() && gradient.size() != block.cols) throw ShapeError("gradient length mismatch");
  const int degree = cv ? cv->degree : 0;
  const double b1 = degree >= 1 ? cv->beta[0] : 0.0;
  const double b2 = degree >= 2 ? cv->beta[1] : 0.0;
  const double m2 = degree >= 2 ? cv->second_moment : 0.0;
  const double s0 = model.s0();
  auto sample = [&](double v) { return std::max(v - K, 0.0) - b1 * (v - s0) - b2 * (v * v - m2); };

  const std::size_t n = block.rows;
  const double shift = sample(row_value(model, block, 0));
  const std::size_t chunks = chunk_count(n, kReductionChunk);
  std::vector<ChunkMoments> moments(chunks);
  std::vector<std::vector<double>> partial_grad(gradient.empty() ? 0 : chunks);
  parallel_chunks(n, kReductionChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
    ChunkMoments m;
    std::vector<double> g;
    if (!gradient.empty()) g.assign(block.cols, 0.0);
    for (std::size_t r = begin; r < end; ++r) {
      const double v = row_value(model, block, r);
      const double y = sample(v) - shift;
      m.sum += y;
      m.sum_sq += y * y;
      ++m.count;
      if (!g.empty()) {
        const double slope = (v > K ? 1.0 : 0.0) - b1 - 2.0 * b2 * v;
        if (slope != 0.0) {
          const double* f = block.data.data() + r * block.cols;
          for (std::size_t k = 0; k < block.cols; ++k) g[k] += slope * f[k];
        }
      }
    }
    moments[c] = m;
    if (!g.empty()) partial_grad[c] = std::move(g);
  });
  const auto est = finish_moments(moments, shift);
  if (!gradient.empty()) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    for (const auto& g : partial_grad) {
      for (std::size_t k = 0; k < block.cols; ++k) gradient[k] += g[k];
    }
    for (auto& g : gradient) g /= static_cast<double>(n);
    if (b2 != 0.0) {
      // X_2 is centred by the closed-form E[S_T^2], which also depends on the coefficients.
      const auto w = second_moment_weights(model, block.maturity);
      const auto coef = model.coefficients();
      for (std::size_t k = 0; k < block.cols; ++k) gradient[k] += 2.0 * b2 * w[k] * coef[k];
    }
  }
  return est;
}

const PricingMethod& PricingSchedule::lookup(double maturity) const {
  for (const auto& [t, m] : entries) {
    if (std::abs(t - maturity) <= 1e-9) return m;
  }
  return fallback;
}

BrownianDriver StreamPlan::pricing(int group, int epoch) const {
  BrownianDriver d;
  d.seed = seed;
  d.fine_steps_per_unit = fine_steps_per_unit;
  d.stream = static_cast<std::uint32_t>(2 * (static_cast<std::uint32_t>(epoch) * 4096u + static_cast<std::uint32_t>(group)));
  return d;
}

BrownianDriver StreamPlan::cv_estimation(int group, int epoch) const {
  BrownianDriver d = pricing(group, epoch);
  d.stream += 1;
  return d;
}

BrownianDriver StreamPlan::evaluation(int group) const {
  BrownianDriver d;
  d.seed = seed;
  d.fine_steps_per_unit = fine_steps_per_unit;
  d.stream = 0x80000000u + 2u * static_cast<std::uint32_t>(group);
  return d;
}

std::vector<PriceEstimate> price_surface(const ChaosModel& model, const QuoteSurface& quotes,
                                         const PricingSchedule& schedule, const StreamPlan& streams,
                                         bool evaluation_streams) {
  std::vector<double> beyond;
  for (const auto& q : quotes.quotes) {
    if (!(q.maturity > 0.0) || q.maturity > model.horizon()) beyond.push_back(q.maturity);
  }
  if (!beyond.empty()) {
    std::sort(beyond.begin(), beyond.end());
    beyond.erase(std::unique(beyond.begin(), beyond.end()), beyond.end());
    std::ostringstream msg;
    msg << "price_surface: maturities outside (0, " << model.horizon() << "]:";
    for (double t : beyond) msg << ' ' << t;
    throw DomainError(msg.str());
  }
  const auto maturities = quotes.maturities();
  std::vector<PriceEstimate> out(quotes.quotes.size());
  for (std::size_t g = 0; g < maturities.size(); ++g) {
    const double T = maturities[g];
    const auto& method = schedule.lookup(T);
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < quotes.quotes.size(); ++k) {
      if (quotes.quotes[k].maturity == T) members.push_back(k);
    }
    auto scale_and_strike = [&](const Quote& q) {
      const double df = q.discount_factor.value_or(1.0);
      const double fwd = q.forward.value_or(model.s0());
      return std::pair{df * fwd / model.s0(), q.strike * model.s0() / fwd};
    };
    if (method.is_quadrature()) {
      const auto block = quadrature_block(model, T, method.n_nodes, method.dimension_cap);
      for (auto k : members) {
        const auto [scale, strike] = scale_and_strike(quotes.quotes[k]);
        out[k] = {scale * quad_call_price(model, block, strike), 0.0};
      }
      continue;
    }
    const int gi = static_cast<int>(g);
    const auto driver = evaluation_streams ? streams.evaluation(gi) : streams.pricing(gi, 0);
    const auto block = sample_features(model, T, method.n_paths, driver);
    FeatureBlock cv_block;
    if (method.cv_degree > 0) {
      auto cv_driver = driver;
      cv_driver.stream += 1;
      cv_block = sample_features(model, T, method.cv_sample_size, cv_driver);
    }
    for (auto k : members) {
      const auto [scale, strike] = scale_and_strike(quotes.quotes[k]);
      PriceEstimate est;
      if (method.cv_degree > 0) {
        const auto cv = estimate_cv(model, cv_block, strike, method.cv_degree);
        est = mc_call_price(model, block, strike, &cv);
      } else {
        est = mc_call_price(model, block, strike, nullptr);
      }
      out[k] = {scale * est.price, scale * est.std_error};
    }
  }
  return out;
}

}  // namespace wcm
