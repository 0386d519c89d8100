#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "wcm/model.hpp"
#include "wcm/pricing.hpp"
#include "wcm/quotes.hpp"

namespace wcm {

struct CalibrationConfig {
  double learning_rate = 1e-3;
  int max_iterations = 10000;
  double weight_decay = 1.0;
  int resimulation_period = 50;
  int patience = 1000;
  double tolerance = 1e-7;  // absolute loss decrease that resets the patience window
  double init_std = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  int fine_steps_per_unit = 2048;
  /// Optimize theta / S_0 against the surface rescaled to unit spot. The vega-weighted loss is
  /// unchanged by this rescaling; it keeps the coefficients at the scale the weight decay expects.
  bool normalize_by_spot = true;

  void validate() const;
};

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  int step = 0;
  std::vector<double> best_theta;
  double best_loss = std::numeric_limits<double>::infinity();
  int best_iteration = -1;
};

/// gamma_i = 1 / Vega_i^2 with the Black vega at each quote's (T, K, sigma_mkt, DF, F).
/// Throws ValidationError naming the quote when a vega is zero or a vol is missing.
std::vector<double> vega_weights(const QuoteSurface& quotes);

/// Prices a quote surface on fixed streams. Feature blocks, quadrature blocks and control
/// variate coefficients are held between calls and refreshed by resimulate().
class SurfacePricer {
 public:
  SurfacePricer(const ChaosModel& model, const QuoteSurface& quotes, PricingSchedule schedule, StreamPlan streams,
                bool evaluation_streams = false);

  /// Draws the Monte Carlo blocks of `epoch`, rebuilds quadrature blocks and re-estimates beta at
  /// the model's current coefficients.
  void resimulate(int epoch, const ChaosModel& model);
  int epoch() const noexcept { return epoch_; }

  /// Model prices aligned with the quotes. With `gradients`, also fills the quotes x coefficients
  /// matrix of price derivatives (row-major), beta held fixed.
  std::vector<PriceEstimate> prices(const ChaosModel& model, std::vector<double>* gradients = nullptr) const;

  const QuoteSurface& quotes() const noexcept { return quotes_; }

 private:
  struct Group {
    double maturity;
    PricingMethod method;
    std::vector<std::size_t> members;
    std::shared_ptr<const FeatureBlock> block;
    std::shared_ptr<const QuadratureBlock> quad;
    std::vector<CvState> cv;  // per member
  };
  QuoteSurface quotes_;
  PricingSchedule schedule_;
  StreamPlan streams_;
  bool evaluation_;
  int epoch_ = -1;
  std::vector<Group> groups_;
};

/// sum_i gamma_i (C_mkt_i - C_model_i)^2.
double loss_value(std::span<const double> market, std::span<const PriceEstimate> model, std::span<const double> weights);

/// Loss on epoch-0 streams with beta estimated at the given model.
double loss(const ChaosModel& model, const QuoteSurface& quotes, std::span<const double> weights,
            const PricingSchedule& schedule, const StreamPlan& streams);
std::vector<double> loss_gradient(const ChaosModel& model, const QuoteSurface& quotes, std::span<const double> weights,
                                  const PricingSchedule& schedule, const StreamPlan& streams);

/// One AdamW update in place: theta <- theta - lr lambda theta - lr m_hat / (sqrt(v_hat) + eps).
/// Throws NumericError naming the step when the gradient is not finite.
void adamw_step(OptimizerState& state, std::vector<double>& theta, std::span<const double> grad,
                const CalibrationConfig& cfg);

struct HistoryRow {
  int iteration = 0;
  double loss = 0.0;
  double best_loss = 0.0;
  double seconds = 0.0;
  bool resimulated = false;
};

struct CalibrationResult {
  ChaosModel model;  // best-by-loss snapshot
  double best_loss = 0.0;
  int best_iteration = -1;
  std::vector<HistoryRow> history;
  bool stopped_by_patience = false;
};

/// Coefficients drawn i.i.d. N(0, init_std^2) from the config seed (in normalized units when
/// normalize_by_spot is set).
ChaosModel initial_model(double s0, int order, int components, const BasisSpec& basis, const CalibrationConfig& cfg);

/// AdamW calibration with periodic resimulation and patience stopping. `history`, when given,
/// is appended to as the run progresses so it survives an exception.
CalibrationResult calibrate(const ChaosModel& model0, const QuoteSurface& quotes, const CalibrationConfig& cfg,
                            const PricingSchedule& schedule, std::vector<HistoryRow>* history = nullptr,
                            const std::function<void(const HistoryRow&)>& on_iteration = {});

/// Implied-vol absolute errors in basis points of model prices against the quotes' vols.
std::vector<double> implied_vol_errors_bp(const QuoteSurface& quotes, std::span<const PriceEstimate> model_prices);

}  // namespace wcm
