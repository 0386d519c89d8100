#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wcm {

enum class OptionType { Call, Put };

/// One quoted European option. `discount_factor` and `forward` refer to the quote's maturity.
struct Quote {
  double maturity = 0.0;
  double strike = 0.0;
  OptionType type = OptionType::Call;
  std::optional<double> price;
  std::optional<double> implied_vol;
  std::optional<double> discount_factor;
  std::optional<double> forward;

  /// Price of the call with the same (T, K), via C = P + DF (F - K) for puts.
  double call_price() const;
};

struct QuoteSurface {
  double spot = 0.0;
  std::string valuation_date;
  std::vector<Quote> quotes;

  /// Sorted distinct maturities.
  std::vector<double> maturities() const;
};

/// Reads the quote CSV. Columns (header names, any order; unknown columns ignored):
///   maturity_years, strike, option_type{C|P}, mid_price, implied_vol, discount_factor, forward, spot
/// Either mid_price or implied_vol may be blank, not both; the missing one is derived from the
/// Black formula on (DF, F). With `require_forward`, DF and F must be present on every row.
/// Throws ValidationError naming the offending row (1-based, header = row 1).
QuoteSurface parse_quotes(std::istream& in, bool require_forward = true);
QuoteSurface parse_quotes(const std::string& path, bool require_forward = true);

/// Writes the same CSV format with full round-trip precision.
void emit_quotes(const QuoteSurface& surface, std::ostream& out);
void emit_quotes(const QuoteSurface& surface, const std::string& path);

/// Least-squares put-call parity fit C - P = DF (F - K) at one maturity.
struct ParityFit {
  double discount_factor = 0.0;
  double forward = 0.0;
  double residual_rms = 0.0;
  double max_abs_residual = 0.0;
  int strikes_used = 0;
};

/// Fits (DF, F) from calls and puts quoted at common strikes; needs at least two strikes.
ParityFit extract_forward_discount(const std::vector<double>& strikes, const std::vector<double>& calls,
                                   const std::vector<double>& puts);

/// Groups a surface by maturity, pairs calls and puts by strike, fits parity and fills DF and F
/// on every quote of that maturity (overwriting). Missing prices or vols are derived afterwards.
QuoteSurface enrich_with_parity(const QuoteSurface& raw, std::vector<std::pair<double, ParityFit>>* fits = nullptr);

/// Continuous dividend yield implied by (DF, F): q = -(1/T) log(F DF / S_0).
double implied_dividend_yield(double spot, double maturity, double discount_factor, double forward);

}  // namespace wcm
