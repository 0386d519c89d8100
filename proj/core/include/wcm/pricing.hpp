#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wcm/model.hpp"
#include "wcm/quotes.hpp"
#include "wcm/rng.hpp"

namespace wcm {

/// Engine choice for one maturity: plain/control-variate Monte Carlo or Gauss-Hermite
/// tensor quadrature (piecewise basis, short maturities).
struct PricingMethod {
  enum class Kind { MonteCarlo, Quadrature };
  Kind kind = Kind::MonteCarlo;
  std::size_t n_paths = 100000;
  int cv_degree = 0;                 // 0, 1 or 2 (2 needs a piecewise basis)
  std::size_t cv_sample_size = 10000;
  int n_nodes = 40;                  // per Gaussian axis
  int dimension_cap = 4;             // quadrature only when u * d <= cap

  static PricingMethod monte_carlo(std::size_t paths, int cv_degree = 0, std::size_t cv_samples = 10000);
  static PricingMethod quadrature(int nodes, int cap = 4);
  bool is_quadrature() const noexcept { return kind == Kind::Quadrature; }
};

/// Control-variate coefficients for one (T, K), estimated on an independent sample.
struct CvState {
  int degree = 0;                    // effective degree after any degradation
  std::array<double, 2> beta{0.0, 0.0};
  std::array<double, 4> sigma_x{};   // row-major 2x2 Cov(X, X)
  std::array<double, 2> sigma_yx{};  // Cov(Y, X)
  double var_y = 0.0;
  double r2 = 0.0;                   // R^2 of Y on X (rho^2 for degree 1)
  double second_moment = 0.0;        // E[S_T^2] used to centre X_2
  bool degraded = false;             // requested degree could not be used (singular Sigma_X)
  StreamTag tag;
};

struct PriceEstimate {
  double price = 0.0;
  double std_error = 0.0;
};

/// Precomputed quadrature representation of S_T for a piecewise basis at maturity T.
///
/// S_T depends on D = u*d standard normals z. The coordinates are rotated (z = H w, H an
/// orthogonal reflection) so that the last axis points along E[grad S_T], the vector of
/// first-order coefficients of the model the block was built from. The D-1 outer axes use a
/// tensor Gauss-Hermite rule; along each outer line S_T(x) is a polynomial of degree <= P in
/// the inner coordinate, recovered exactly from its values at P+1 points, and the payoff is
/// integrated exactly over the intervals where S_T(x) > K.
struct QuadratureBlock {
  double maturity = 0.0;
  int n_nodes = 0;
  int dimension = 0;                  // u * d
  std::size_t outer_count = 0;
  std::size_t cols = 0;
  int points = 0;                     // P + 1 interpolation points along each line
  std::vector<double> outer_weights;  // outer_count
  std::vector<double> features;       // outer_count x points x cols
  std::vector<double> interp;         // points x points: monomial coefficients from point values
  std::vector<double> direction;      // D, unit inner axis in the original coordinates
};

/// Throws ConfigError for non-piecewise bases and when u*d exceeds `dimension_cap`. The block
/// prices any coefficient vector exactly along the inner axis; only the axis choice uses the
/// model's current coefficients.
QuadratureBlock quadrature_block(const ChaosModel& model, double T, int n_nodes, int dimension_cap = 4);

/// E[(S_T - K)_+] over a quadrature block; optional exact gradient in the coefficients.
double quad_call_price(const ChaosModel& model, const QuadratureBlock& block, double K,
                       std::span<double> gradient = {});
double quad_call_price(const ChaosModel& model, double T, double K, int n_nodes, int dimension_cap = 4);

/// beta from an independent estimation block. X_1 = S_T - S_0, X_2 = S_T^2 - E[S_T^2] with the
/// closed-form second moment. A singular Sigma_X degrades to a lower degree (ultimately 0)
/// and sets `degraded`.
CvState estimate_cv(const ChaosModel& model, const FeatureBlock& estimation_block, double K, int degree);

/// Monte Carlo call price: the mean of Y - beta . X with its standard error. Reduction is chunked in row order, so the result is
/// independent of the thread count.
PriceEstimate mc_call_price(const ChaosModel& model, const FeatureBlock& block, double K, const CvState* cv = nullptr);

/// Price and its gradient with respect to the coefficients, with beta held fixed:
///   d/dd_a = mean[ 1{S_T > K} f_a - beta_1 f_a - beta_2 (2 S_T f_a - 2 w_a d_a) ].
PriceEstimate call_price_gradient(const ChaosModel& model, const FeatureBlock& block, double K,
                                  const CvState* cv, std::span<double> gradient);

/// Per-maturity engine schedule. Entries match a maturity within 1e-9; others use `fallback`.
struct PricingSchedule {
  PricingMethod fallback;
  std::vector<std::pair<double, PricingMethod>> entries;

  const PricingMethod& lookup(double maturity) const;
};

/// Stream assignment for pricing: maturity group g, epoch e map to disjoint streams.
struct StreamPlan {
  std::uint64_t seed = 1;
  int fine_steps_per_unit = 2048;

  BrownianDriver pricing(int group, int epoch) const;
  BrownianDriver cv_estimation(int group, int epoch) const;
  /// Streams reserved for out-of-sample evaluation; never produced by pricing()/cv_estimation().
  BrownianDriver evaluation(int group) const;
};

/// Model prices of the quotes' call equivalents, aligned with quotes.quotes. A quote with
/// discount factor DF and forward F is priced as DF (F / S_0) C_model(T, K S_0 / F).
/// Throws DomainError listing every maturity beyond the model horizon.
std::vector<PriceEstimate> price_surface(const ChaosModel& model, const QuoteSurface& quotes,
                                         const PricingSchedule& schedule, const StreamPlan& streams,
                                         bool evaluation_streams = false);

}  // namespace wcm
