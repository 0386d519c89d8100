#include "wcm/model.hpp"

#include <cmath>
#include <string>

#include "wcm/conditional.hpp"
#include "wcm/errors.hpp"
#include "wcm/integrals.hpp"
#include "wcm/parallel.hpp"

namespace wcm {

ChaosModel::ChaosModel(double s0, int order, int components, BasisSpec basis, std::vector<double> coefficients)
    : s0_(s0), order_(order), components_(components), basis_(std::move(basis)) {
  if (!std::isfinite(s0_)) throw DomainError("ChaosModel: S_0 must be finite");
  indices_ = std::make_shared<const std::vector<MultiIndex>>(enumerate_indices(order_, basis_.size(), components_));
  if (coefficients.empty()) coefficients.assign(indices_->size(), 0.0);
  set_coefficients(std::move(coefficients));
}

void ChaosModel::set_coefficients(std::vector<double> coefficients) {
  if (coefficients.size() != indices_->size()) {
    throw ShapeError("ChaosModel: expected " + std::to_string(indices_->size()) + " coefficients, got " +
                     std::to_string(coefficients.size()));
  }
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw DomainError("ChaosModel: coefficients must be finite");
  }
  coefficients_ = std::move(coefficients);
}

FeatureBlock sample_features(const ChaosModel& model, double T, std::size_t n_paths, const BrownianDriver& driver) {
  if (!(T > 0.0) || T > model.horizon()) {
    throw DomainError("sample_features: maturity " + std::to_string(T) + " outside (0, horizon]");
  }
  const double times[] = {T};
  const auto integrals = sample_integrals(model.basis(), model.components(), driver, times, n_paths);
  const ConditionalFeatureMap fmap(model.basis(), model.components(), model.indices(), T);

  FeatureBlock block;
  block.maturity = T;
  block.rows = n_paths;
  block.cols = model.coefficient_count();
  block.data.assign(block.rows * block.cols, 0.0);
  block.tag = {driver.seed, driver.stream};
  parallel_chunks(n_paths, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> scratch(fmap.scratch_size());
    for (std::size_t p = begin; p < end; ++p) {
      fmap.evaluate(integrals.row(0, p), std::span<double>(block.data).subspan(p * block.cols, block.cols), scratch);
    }
  });
  return block;
}

std::vector<double> terminal_values(const ChaosModel& model, const FeatureBlock& block) {
  if (block.cols != model.coefficient_count()) {
    throw ShapeError("terminal_values: block has " + std::to_string(block.cols) + " columns, model has " +
                     std::to_string(model.coefficient_count()) + " coefficients");
  }
  const auto coef = model.coefficients();
  std::vector<double> s(block.rows);
  parallel_chunks(block.rows, kReductionChunk, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const double* f = block.data.data() + r * block.cols;
      double v = model.s0();
      for (std::size_t k = 0; k < block.cols; ++k) v += f[k] * coef[k];
      s[r] = v;
    }
  });
  return s;
}

std::vector<double> second_moment_weights(const ChaosModel& model, double T) {
  const auto& basis = model.basis();
  if (!basis.is_piecewise()) throw ConfigError("second_moment: closed form requires a piecewise-constant basis");
  const int u = basis.locate_cell(T);
  const double frac = (T - basis.grid()[static_cast<std::size_t>(u)]) / basis.width(u);
  const auto indices = model.indices();
  std::vector<double> w(indices.size(), 0.0);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto& a = indices[k];
    if (a.last_active_basis() > u) continue;
    int in_cell = 0;
    for (int j = 0; j < a.components(); ++j) in_cell += a.at(u, j);
    w[k] = std::pow(frac, in_cell) / a.factorial();
  }
  return w;
}

double second_moment(const ChaosModel& model, double T) {
  const auto w = second_moment_weights(model, T);
  const auto c = model.coefficients();
  double m2 = model.s0() * model.s0();
  for (std::size_t k = 0; k < w.size(); ++k) m2 += w[k] * c[k] * c[k];
  return m2;
}

PathGrid path_grid(const ChaosModel& model, std::span<const double> times, std::size_t n_paths,
                   const BrownianDriver& driver) {
  for (double t : times) {
    if (!(t > 0.0) || t > model.horizon()) throw DomainError("path_grid: times must lie in (0, horizon]");
  }
  const auto integrals = sample_integrals(model.basis(), model.components(), driver, times, n_paths);
  std::vector<ConditionalFeatureMap> maps;
  maps.reserve(times.size());
  for (double t : times) maps.emplace_back(model.basis(), model.components(), model.indices(), t);

  PathGrid grid;
  grid.times.assign(times.begin(), times.end());
  grid.n_paths = n_paths;
  grid.values.assign(n_paths * times.size(), 0.0);
  const auto coef = model.coefficients();
  parallel_chunks(n_paths, 512, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> scratch(maps.empty() ? 0 : maps.front().scratch_size());
    std::vector<double> features(coef.size());
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t k = 0; k < times.size(); ++k) {
        maps[k].evaluate(integrals.row(k, p), features, scratch);
        double v = model.s0();
        for (std::size_t c = 0; c < coef.size(); ++c) v += features[c] * coef[c];
        grid.values[p * times.size() + k] = v;
      }
    }
  });
  return grid;
}

std::shared_ptr<const FeatureBlock> FeatureCache::get(const ChaosModel& model, double T, std::size_t n_paths,
                                                      const BrownianDriver& driver) {
  const StreamTag tag{driver.seed, driver.stream};
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (it->maturity == T && it->n_paths == n_paths && it->tag == tag &&
        it->fine_steps == driver.fine_steps_per_unit && it->block->cols == model.coefficient_count()) {
      entries_.splice(entries_.begin(), entries_, it);
      return entries_.front().block;
    }
  }
  auto block = std::make_shared<const FeatureBlock>(sample_features(model, T, n_paths, driver));
  bytes_ += block->bytes();
  entries_.push_front({T, n_paths, tag, driver.fine_steps_per_unit, block});
  while (bytes_ > max_bytes_ && entries_.size() > 1) {
    bytes_ -= entries_.back().block->bytes();
    entries_.pop_back();
  }
  return block;
}

void FeatureCache::clear() noexcept {
  entries_.clear();
  bytes_ = 0;
}

}  // namespace wcm
