#include "wcm/calibrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "wcm/black_scholes.hpp"
#include "wcm/errors.hpp"

namespace wcm {

void CalibrationConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("calibration: learning_rate must be positive");
  if (max_iterations < 0) throw ConfigError("calibration: max_iterations must be nonnegative");
  if (!(weight_decay >= 0.0)) throw ConfigError("calibration: weight_decay must be nonnegative");
  if (resimulation_period < 1) throw ConfigError("calibration: resimulation_period must be positive");
  if (patience < 1) throw ConfigError("calibration: patience must be positive");
  if (!(tolerance >= 0.0)) throw ConfigError("calibration: tolerance must be nonnegative");
  if (!(init_std >= 0.0)) throw ConfigError("calibration: init_std must be nonnegative");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("calibration: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("calibration: adam_eps must be positive");
  if (fine_steps_per_unit < 1) throw ConfigError("calibration: fine_steps_per_unit must be positive");
}

namespace {

double quote_df(const Quote& q) { return q.discount_factor.value_or(1.0); }
double quote_forward(const Quote& q, double spot) { return q.forward.value_or(spot); }

}  // namespace

std::vector<double> vega_weights(const QuoteSurface& quotes) {
  std::vector<double> w(quotes.quotes.size());
  for (std::size_t k = 0; k < quotes.quotes.size(); ++k) {
    const auto& q = quotes.quotes[k];
    if (!q.implied_vol) throw ValidationError("vega_weights: quote " + std::to_string(k + 1) + " has no implied vol");
    const double vega = black_vega(quote_forward(q, quotes.spot), q.strike, q.maturity, *q.implied_vol, quote_df(q));
    if (!(vega > 0.0) || !std::isfinite(1.0 / (vega * vega))) {
      std::ostringstream msg;
      msg << "vega_weights: quote " << k + 1 << " (T = " << q.maturity << ", K = " << q.strike
          << ") has zero vega";
      throw ValidationError(msg.str());
    }
    w[k] = 1.0 / (vega * vega);
  }
  return w;
}

SurfacePricer::SurfacePricer(const ChaosModel& model, const QuoteSurface& quotes, PricingSchedule schedule,
                             StreamPlan streams, bool evaluation_streams)
    : quotes_(quotes), schedule_(std::move(schedule)), streams_(streams), evaluation_(evaluation_streams) {
  std::vector<double> beyond;
  for (const auto& q : quotes_.quotes) {
    if (!(q.maturity > 0.0) || q.maturity > model.horizon()) beyond.push_back(q.maturity);
  }
  if (!beyond.empty()) {
    std::sort(beyond.begin(), beyond.end());
    beyond.erase(std::unique(beyond.begin(), beyond.end()), beyond.end());
    std::ostringstream msg;
    msg << "quotes have maturities outside (0, " << model.horizon() << "]:";
    for (double t : beyond) msg << ' ' << t;
    throw DomainError(msg.str());
  }
  for (double T : quotes_.maturities()) {
    Group g{T, schedule_.lookup(T), {}, nullptr, nullptr, {}};
    for (std::size_t k = 0; k < quotes_.quotes.size(); ++k) {
      if (quotes_.quotes[k].maturity == T) g.members.push_back(k);
    }
    if (g.method.is_quadrature()) {
      g.quad = std::make_shared<const QuadratureBlock>(
          quadrature_block(model, T, g.method.n_nodes, g.method.dimension_cap));
    } else if (g.method.cv_degree == 2 && !model.basis().is_piecewise()) {
      throw ConfigError("schedule: cv_degree 2 requires a piecewise-constant basis");
    }
    groups_.push_back(std::move(g));
  }
}

void SurfacePricer::resimulate(int epoch, const ChaosModel& model) {
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    auto& g = groups_[gi];
    if (g.method.is_quadrature()) {
      g.quad = std::make_shared<const QuadratureBlock>(
          quadrature_block(model, g.maturity, g.method.n_nodes, g.method.dimension_cap));
      continue;
    }
    const int group = static_cast<int>(gi);
    const auto driver = evaluation_ ? streams_.evaluation(group) : streams_.pricing(group, epoch);
    g.block = std::make_shared<const FeatureBlock>(sample_features(model, g.maturity, g.method.n_paths, driver));
    g.cv.clear();
    if (g.method.cv_degree > 0) {
      auto cv_driver = driver;
      cv_driver.stream += 1;
      const auto est = sample_features(model, g.maturity, g.method.cv_sample_size, cv_driver);
      for (auto k : g.members) {
        const auto& q = quotes_.quotes[k];
        const double strike = q.strike * model.s0() / quote_forward(q, model.s0());
        g.cv.push_back(estimate_cv(model, est, strike, g.method.cv_degree));
      }
    }
  }
  epoch_ = epoch;
}

std::vector<PriceEstimate> SurfacePricer::prices(const ChaosModel& model, std::vector<double>* gradients) const {
  const std::size_t cols = model.coefficient_count();
  std::vector<PriceEstimate> out(quotes_.quotes.size());
  if (gradients) gradients->assign(quotes_.quotes.size() * cols, 0.0);
  for (const auto& g : groups_) {
    if (!g.method.is_quadrature() && !g.block) throw ConfigError("SurfacePricer: resimulate() has not been called");
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      const std::size_t k = g.members[m];
      const auto& q = quotes_.quotes[k];
      const double fwd = quote_forward(q, model.s0());
      const double scale = quote_df(q) * fwd / model.s0();
      const double strike = q.strike * model.s0() / fwd;
      std::span<double> grad;
      if (gradients) grad = std::span<double>(*gradients).subspan(k * cols, cols);
      PriceEstimate est;
      if (g.method.is_quadrature()) {
        est.price = quad_call_price(model, *g.quad, strike, grad);
      } else {
        if (g.cv.empty()) {
          est = call_price_gradient(model, *g.block, strike, nullptr, grad);
        } else {
          // beta stays frozen; the X_2 centring follows the model being priced
          CvState cv = g.cv[m];
          if (cv.degree == 2) cv.second_moment = second_moment(model, g.maturity);
          est = call_price_gradient(model, *g.block, strike, &cv, grad);
        }
      }
      out[k] = {scale * est.price, scale * est.std_error};
      for (auto& v : grad) v *= scale;
    }
  }
  return out;
}

double loss_value(std::span<const double> market, std::span<const PriceEstimate> model, std::span<const double> weights) {
  if (market.size() != model.size() || market.size() != weights.size()) throw ShapeError("loss: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < market.size(); ++k) {
    const double e = market[k] - model[k].price;
    acc += weights[k] * e * e;
  }
  return acc;
}

namespace {

std::vector<double> market_prices(const QuoteSurface& quotes) {
  std::vector<double> c(quotes.quotes.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = quotes.quotes[k].call_price();
  return c;
}

void accumulate_gradient(std::span<const double> market, std::span<const PriceEstimate> model,
                         std::span<const double> weights, const std::vector<double>& dprice, std::span<double> out) {
  const std::size_t cols = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < market.size(); ++k) {
    const double f = -2.0 * weights[k] * (market[k] - model[k].price);
    if (f == 0.0) continue;
    const double* row = dprice.data() + k * cols;
    for (std::size_t a = 0; a < cols; ++a) out[a] += f * row[a];
  }
}

}  // namespace

double loss(const ChaosModel& model, const QuoteSurface& quotes, std::span<const double> weights,
            const PricingSchedule& schedule, const StreamPlan& streams) {
  SurfacePricer pricer(model, quotes, schedule, streams);
  pricer.resimulate(0, model);
  const auto p = pricer.prices(model);
  const auto c = market_prices(quotes);
  return loss_value(c, p, weights);
}

std::vector<double> loss_gradient(const ChaosModel& model, const QuoteSurface& quotes, std::span<const double> weights,
                                  const PricingSchedule& schedule, const StreamPlan& streams) {
  SurfacePricer pricer(model, quotes, schedule, streams);
  pricer.resimulate(0, model);
  std::vector<double> dprice;
  const auto p = pricer.prices(model, &dprice);
  const auto c = market_prices(quotes);
  std::vector<double> g(model.coefficient_count());
  accumulate_gradient(c, p, weights, dprice, g);
  return g;
}

void adamw_step(OptimizerState& state, std::vector<double>& theta, std::span<const double> grad,
                const CalibrationConfig& cfg) {
  if (grad.size() != theta.size()) throw ShapeError("adamw_step: gradient length mismatch");
  if (state.m.empty()) {
    state.m.assign(theta.size(), 0.0);
    state.v.assign(theta.size(), 0.0);
  }
  if (state.m.size() != theta.size()) throw ShapeError("adamw_step: optimizer state length mismatch");
  for (double g : grad) {
    if (!std::isfinite(g)) throw NumericError("adamw_step: non-finite gradient at step " + std::to_string(state.step + 1));
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, state.step);
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, state.step);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    state.m[k] = cfg.adam_beta1 * state.m[k] + (1.0 - cfg.adam_beta1) * grad[k];
    state.v[k] = cfg.adam_beta2 * state.v[k] + (1.0 - cfg.adam_beta2) * grad[k] * grad[k];
    const double m_hat = state.m[k] / bc1;
    const double v_hat = state.v[k] / bc2;
    theta[k] -= cfg.learning_rate * cfg.weight_decay * theta[k];
    theta[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
}

ChaosModel initial_model(double s0, int order, int components, const BasisSpec& basis, const CalibrationConfig& cfg) {
  ChaosModel model(s0, order, components, basis);
  std::vector<double> c(model.coefficient_count());
  BrownianDriver driver;
  driver.seed = cfg.seed;
  driver.stream = 0xFFFFFF00u;
  driver.normals(0, c);
  const double scale = cfg.init_std * (cfg.normalize_by_spot ? s0 : 1.0);
  for (auto& v : c) v *= scale;
  model.set_coefficients(std::move(c));
  return model;
}

CalibrationResult calibrate(const ChaosModel& model0, const QuoteSurface& quotes, const CalibrationConfig& cfg,
                            const PricingSchedule& schedule, std::vector<HistoryRow>* history,
                            const std::function<void(const HistoryRow&)>& on_iteration) {
  cfg.validate();
  const double unit = cfg.normalize_by_spot ? model0.s0() : 1.0;
  if (!(unit > 0.0)) throw DomainError("calibrate: normalization needs a positive S_0");

  QuoteSurface work = quotes;
  work.spot = quotes.spot / unit;
  for (auto& q : work.quotes) {
    q.strike /= unit;
    if (q.price) *q.price /= unit;
    if (q.forward) *q.forward /= unit;
  }
  std::vector<double> theta(model0.coefficients().begin(), model0.coefficients().end());
  for (auto& v : theta) v /= unit;
  ChaosModel model(model0.s0() / unit, model0.order(), model0.components(), model0.basis(), theta);

  const auto weights = vega_weights(work);
  const auto market = market_prices(work);
  SurfacePricer pricer(model, work, schedule, StreamPlan{cfg.seed, cfg.fine_steps_per_unit});

  CalibrationResult result{model0, 0.0, -1, {}, false};
  OptimizerState state;
  state.best_theta = theta;
  double reference = std::numeric_limits<double>::infinity();
  int last_improvement = 0;
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> dprice, grad(theta.size());

  if (cfg.max_iterations == 0) {
    pricer.resimulate(0, model);
    result.best_loss = loss_value(market, pricer.prices(model), weights);
    return result;
  }
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const bool resim = it % cfg.resimulation_period == 0;
    if (resim) pricer.resimulate(it / cfg.resimulation_period, model);
    const auto p = pricer.prices(model, &dprice);
    const double L = loss_value(market, p, weights);
    if (!std::isfinite(L)) throw NumericError("calibrate: non-finite loss at iteration " + std::to_string(it));
    accumulate_gradient(market, p, weights, dprice, grad);
    if (L < state.best_loss) {
      state.best_loss = L;
      state.best_theta = theta;
      state.best_iteration = it;
    }
    if (L < reference - cfg.tolerance) {
      reference = L;
      last_improvement = it;
    }
    HistoryRow row{it, L, state.best_loss,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), resim};
    result.history.push_back(row);
    if (history) history->push_back(row);
    if (on_iteration) on_iteration(row);
    if (it - last_improvement >= cfg.patience) {
      result.stopped_by_patience = true;
      break;
    }
    adamw_step(state, theta, grad, cfg);
    model.set_coefficients(theta);
  }
  for (auto& v : state.best_theta) v *= unit;
  result.model.set_coefficients(state.best_theta);
  result.best_loss = state.best_loss;
  result.best_iteration = state.best_iteration;
  return result;
}

std::vector<double> implied_vol_errors_bp(const QuoteSurface& quotes, std::span<const PriceEstimate> model_prices) {
  if (model_prices.size() != quotes.quotes.size()) throw ShapeError("implied_vol_errors_bp: length mismatch");
  std::vector<double> out(quotes.quotes.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& q = quotes.quotes[k];
    if (!q.implied_vol) throw ValidationError("implied_vol_errors_bp: quote " + std::to_string(k + 1) + " has no vol");
    const double df = quote_df(q), fwd = quote_forward(q, quotes.spot);
    const double lower = df * std::max(fwd - q.strike, 0.0), upper = df * fwd;
    const double price = std::clamp(model_prices[k].price, lower, upper);
    const double vol = implied_vol_black(price, fwd, q.strike, q.maturity, df).vol;
    out[k] = std::abs(vol - *q.implied_vol) * 1e4;
  }
  return out;
}

}  // namespace wcm
