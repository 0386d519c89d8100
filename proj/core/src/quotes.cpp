#include "wcm/quotes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "wcm/black_scholes.hpp"
#include "wcm/errors.hpp"

namespace wcm {

double Quote::call_price() const {
  if (!price) throw ValidationError("quote has no price");
  if (type == OptionType::Call) return *price;
  if (!forward) throw ValidationError("put quote needs a forward for the call equivalent");
  return *price + discount_factor.value_or(1.0) * (*forward - strike);
}

std::vector<double> QuoteSurface::maturities() const {
  std::vector<double> t;
  for (const auto& q : quotes) t.push_back(q.maturity);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
  throw ValidationError("quotes row " + std::to_string(row) + ": " + what);
}

std::optional<double> parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    row_error(row, "column " + column + " is not a number: '" + cell + "'");
  }
  if (used != cell.size() || !std::isfinite(v)) row_error(row, "column " + column + " is not a finite number: '" + cell + "'");
  return v;
}

// Fills in the missing price or vol and checks the no-arbitrage bounds.
void complete_quote(Quote& q, std::size_t row) {
  if (!q.discount_factor || !q.forward) return;
  const double df = *q.discount_factor, fwd = *q.forward;
  if (!(df > 0.0) || !(fwd > 0.0)) row_error(row, "discount_factor and forward must be positive");
  if (q.price) {
    const double p = *q.price;
    const double lower = q.type == OptionType::Call ? df * std::max(fwd - q.strike, 0.0) : df * std::max(q.strike - fwd, 0.0);
    const double upper = q.type == OptionType::Call ? df * fwd : df * q.strike;
    const double tol = 1e-12 * df * fwd;
    if (p < lower - tol || p > upper + tol) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "price " << p << " violates no-arbitrage bounds [" << lower << ", " << upper << "]";
      row_error(row, msg.str());
    }
    if (!q.implied_vol) {
      try {
        q.implied_vol = implied_vol_black(p, fwd, q.strike, q.maturity, df, q.type).vol;
      } catch (const InversionError& e) {
        row_error(row, e.what());
      }
    }
  } else {
    q.price = black_price(fwd, q.strike, q.maturity, *q.implied_vol, df, q.type);
  }
}

}  // namespace

QuoteSurface parse_quotes(std::istream& in, bool require_forward) {
  QuoteSurface surface;
  std::string line;
  if (!std::getline(in, line)) return surface;
  const auto header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  for (const char* name : {"maturity_years", "strike", "option_type", "mid_price", "implied_vol"}) {
    if (!col.count(name)) throw ValidationError(std::string("quotes header lacks column ") + name);
  }
  auto cell = [&](const std::vector<std::string>& cells, const std::string& name) -> std::string {
    const auto it = col.find(name);
    if (it == col.end() || it->second >= cells.size()) return {};
    return cells[it->second];
  };
  std::size_t row = 1;
  bool have_spot = false;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    Quote q;
    const auto T = parse_number(cell(cells, "maturity_years"), row, "maturity_years");
    const auto K = parse_number(cell(cells, "strike"), row, "strike");
    if (!T || !(*T > 0.0)) row_error(row, "maturity_years must be positive");
    if (!K || !(*K > 0.0)) row_error(row, "strike must be positive");
    q.maturity = *T;
    q.strike = *K;
    const std::string type = cell(cells, "option_type");
    if (type == "C" || type == "c") {
      q.type = OptionType::Call;
    } else if (type == "P" || type == "p") {
      q.type = OptionType::Put;
    } else {
      row_error(row, "option_type must be C or P, got '" + type + "'");
    }
    q.price = parse_number(cell(cells, "mid_price"), row, "mid_price");
    q.implied_vol = parse_number(cell(cells, "implied_vol"), row, "implied_vol");
    q.discount_factor = parse_number(cell(cells, "discount_factor"), row, "discount_factor");
    q.forward = parse_number(cell(cells, "forward"), row, "forward");
    if (!q.price && !q.implied_vol) row_error(row, "mid_price and implied_vol are both blank");
    if (q.implied_vol && !(*q.implied_vol > 0.0)) row_error(row, "implied_vol must be positive");
    if (const auto s = parse_number(cell(cells, "spot"), row, "spot")) {
      if (!(*s > 0.0)) row_error(row, "spot must be positive");
      if (have_spot && std::abs(*s - surface.spot) > 1e-12 * surface.spot) row_error(row, "spot differs from earlier rows");
      surface.spot = *s;
      have_spot = true;
    }
    const std::string date = cell(cells, "valuation_date");
    if (!date.empty()) surface.valuation_date = date;
    if (!q.discount_factor || !q.forward) {
      if (require_forward) {
        row_error(row, "discount_factor and forward are required; derive them from put-call parity first "
                       "(extract_forward_discount / the parity command)");
      }
      if (!q.price) row_error(row, "implied_vol without discount_factor and forward cannot be priced");
    }
    complete_quote(q, row);
    surface.quotes.push_back(q);
  }
  if (!surface.quotes.empty() && !have_spot) throw ValidationError("quotes: no spot given");
  return surface;
}

QuoteSurface parse_quotes(const std::string& path, bool require_forward) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open quotes file " + path);
  return parse_quotes(in, require_forward);
}

namespace {

// shortest text that parses back to the same double
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void put_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << shortest(*v);
}

}  // namespace

void emit_quotes(const QuoteSurface& surface, std::ostream& out) {
  out << "maturity_years,strike,option_type,mid_price,implied_vol,discount_factor,forward,spot";
  if (!surface.valuation_date.empty()) out << ",valuation_date";
  out << '\n';
  for (const auto& q : surface.quotes) {
    out << shortest(q.maturity) << ',' << shortest(q.strike) << ',' << (q.type == OptionType::Call ? 'C' : 'P') << ',';
    put_optional(out, q.price);
    out << ',';
    put_optional(out, q.implied_vol);
    out << ',';
    put_optional(out, q.discount_factor);
    out << ',';
    put_optional(out, q.forward);
    out << ',' << shortest(surface.spot);
    if (!surface.valuation_date.empty()) out << ',' << surface.valuation_date;
    out << '\n';
  }
}

void emit_quotes(const QuoteSurface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write quotes file " + path);
  emit_quotes(surface, out);
}

ParityFit extract_forward_discount(const std::vector<double>& strikes, const std::vector<double>& calls,
                                   const std::vector<double>& puts) {
  if (strikes.size() != calls.size() || strikes.size() != puts.size()) throw ShapeError("parity: length mismatch");
  const std::size_t n = strikes.size();
  if (n < 2) throw ValidationError("parity: need at least two strikes with both a call and a put");
  double mk = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mk += strikes[k];
    my += calls[k] - puts[k];
  }
  mk /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = strikes[k] - mk;
    sxx += dx * dx;
    sxy += dx * (calls[k] - puts[k] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("parity: strikes must not all coincide");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mk;
  ParityFit fit;
  fit.discount_factor = -slope;
  if (!(fit.discount_factor > 0.0)) throw NumericError("parity: fitted discount factor is not positive");
  fit.forward = intercept / fit.discount_factor;
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = calls[k] - puts[k] - (intercept + slope * strikes[k]);
    ss += r * r;
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  fit.strikes_used = static_cast<int>(n);
  return fit;
}

QuoteSurface enrich_with_parity(const QuoteSurface& raw, std::vector<std::pair<double, ParityFit>>* fits) {
  QuoteSurface out = raw;
  for (double T : raw.maturities()) {
    std::map<double, std::pair<std::optional<double>, std::optional<double>>> by_strike;
    for (const auto& q : raw.quotes) {
      if (q.maturity != T || !q.price) continue;
      auto& slot = by_strike[q.strike];
      (q.type == OptionType::Call ? slot.first : slot.second) = *q.price;
    }
    std::vector<double> k, c, p;
    for (const auto& [strike, cp] : by_strike) {
      if (cp.first && cp.second) {
        k.push_back(strike);
        c.push_back(*cp.first);
        p.push_back(*cp.second);
      }
    }
    ParityFit fit;
    try {
      fit = extract_forward_discount(k, c, p);
    } catch (const ValidationError& e) {
      std::ostringstream msg;
      msg << "maturity " << T << ": " << e.what();
      throw ValidationError(msg.str());
    }
    if (fits) fits->emplace_back(T, fit);
    for (std::size_t i = 0; i < out.quotes.size(); ++i) {
      auto& q = out.quotes[i];
      if (q.maturity != T) continue;
      q.discount_factor = fit.discount_factor;
      q.forward = fit.forward;
      complete_quote(q, i + 2);
    }
  }
  return out;
}

double implied_dividend_yield(double spot, double maturity, double discount_factor, double forward) {
  if (!(spot > 0.0) || !(maturity > 0.0) || !(discount_factor > 0.0) || !(forward > 0.0)) {
    throw DomainError("implied_dividend_yield: inputs must be positive");
  }
  return -std::log(forward * discount_factor / spot) / maturity;
}

}  // namespace wcm
