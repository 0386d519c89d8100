#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <span>
#include <vector>

#include "wcm/basis.hpp"
#include "wcm/multi_index.hpp"
#include "wcm/rng.hpp"

namespace wcm {

/// Wiener chaos martingale model
///   S_T = S_0 + sum_{a in A(P,M,d)} d_a Phi_a,   S_t = E[S_T | F_t].
/// Coefficients are aligned with enumerate_indices(P, M, d).
class ChaosModel {
 public:
  /// Empty `coefficients` means all zeros.
  ChaosModel(double s0, int order, int components, BasisSpec basis, std::vector<double> coefficients = {});

  double s0() const noexcept { return s0_; }
  int order() const noexcept { return order_; }
  int components() const noexcept { return components_; }
  int basis_count() const noexcept { return basis_.size(); }
  double horizon() const noexcept { return basis_.horizon(); }
  const BasisSpec& basis() const noexcept { return basis_; }

  std::span<const MultiIndex> indices() const noexcept { return *indices_; }
  std::span<const double> coefficients() const noexcept { return coefficients_; }
  std::size_t coefficient_count() const noexcept { return coefficients_.size(); }

  void set_coefficients(std::vector<double> coefficients);

 private:
  double s0_;
  int order_;
  int components_;
  BasisSpec basis_;
  std::shared_ptr<const std::vector<MultiIndex>> indices_;
  std::vector<double> coefficients_;
};

/// Identifies the random numbers behind a block so it can be regenerated bit-exactly.
struct StreamTag {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  friend bool operator==(const StreamTag&, const StreamTag&) = default;
};

/// Monte Carlo samples of E[Phi_a | F_T]: one row per path, one column per index in
/// enumeration order.
struct FeatureBlock {
  double maturity = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  StreamTag tag;

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
  std::size_t bytes() const noexcept { return data.size() * sizeof(double); }
};

/// Monte Carlo feature block at maturity T in (0, horizon]. Piecewise bases use the closed
/// form (columns annihilated at T are exact zeros); other bases use the Dyson expansion.
FeatureBlock sample_features(const ChaosModel& model, double T, std::size_t n_paths, const BrownianDriver& driver);

/// S_T samples S_0 + features . coefficients, one per block row.
std::vector<double> terminal_values(const ChaosModel& model, const FeatureBlock& block);

/// Per-coefficient weights w_a with E[(S_T)^2] = S_0^2 + sum_a w_a d_a^2 (piecewise basis only):
/// w_a = ((T - s_u)/delta_u)^{sum_j a_u^j} / a! for indices alive at T, else 0.
std::vector<double> second_moment_weights(const ChaosModel& model, double T);

/// E[(S_T)^2] in closed form. Throws ConfigError for non-piecewise bases.
double second_moment(const ChaosModel& model, double T);

/// Jointly simulated S_t on a time grid; row-major paths x times.
struct PathGrid {
  std::vector<double> times;
  std::size_t n_paths = 0;
  std::vector<double> values;

  double at(std::size_t path, std::size_t time) const { return values[path * times.size() + time]; }
  std::span<const double> path(std::size_t p) const {
    return std::span<const double>(values).subspan(p * times.size(), times.size());
  }
};

/// S_t^theta at each of the sorted `times` (in (0, horizon]) along shared Brownian paths.
PathGrid path_grid(const ChaosModel& model, std::span<const double> times, std::size_t n_paths,
                   const BrownianDriver& driver);

/// Memory-bounded cache of Monte Carlo feature blocks keyed by (maturity, paths, stream tag).
/// Least recently used blocks are evicted once the byte budget is exceeded.
class FeatureCache {
 public:
  explicit FeatureCache(std::size_t max_bytes = std::size_t{2} << 30) : max_bytes_(max_bytes) {}

  std::shared_ptr<const FeatureBlock> get(const ChaosModel& model, double T, std::size_t n_paths,
                                          const BrownianDriver& driver);
  void clear() noexcept;
  std::size_t bytes() const noexcept { return bytes_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    double maturity;
    std::size_t n_paths;
    StreamTag tag;
    int fine_steps;
    std::shared_ptr<const FeatureBlock> block;
  };
  std::size_t max_bytes_;
  std::size_t bytes_ = 0;
  std::list<Entry> entries_;  // front = most recently used
};

}  // namespace wcm
