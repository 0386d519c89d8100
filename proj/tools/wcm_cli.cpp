// wcm: command-line front end for surface generation, calibration, pricing and reports.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wcm/black_scholes.hpp"
#include "wcm/calibrate.hpp"
#include "wcm/errors.hpp"
#include "wcm/exotic_bs.hpp"
#include "wcm/exotic_mc.hpp"
#include "wcm/heston.hpp"
#include "wcm/lewis.hpp"
#include "wcm/model_io.hpp"
#include "wcm/parallel.hpp"
#include "wcm/quotes.hpp"
#include "wcm/rough_heston.hpp"
#include "wcm/schedule_io.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

json parse_json_file(const std::string& path) {
  const std::string text = wcm::read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw wcm::ConfigError(path + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw wcm::ValidationError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw wcm::ValidationError(std::string(what) + " is empty");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw wcm::ConfigError("cannot write " + path);
  out << std::setprecision(17);
  return out;
}

wcm::HestonParams heston_from_json(const json& j) {
  wcm::HestonParams p;
  p.s0 = j.value("s0", p.s0);
  p.kappa = j.value("kappa", p.kappa);
  p.vbar = j.value("vbar", p.vbar);
  p.eps = j.value("eps", p.eps);
  p.rho = j.value("rho", p.rho);
  p.v0 = j.value("v0", p.v0);
  p.rate = j.value("rate", p.rate);
  p.dividend = j.value("dividend", p.dividend);
  p.validate();
  return p;
}

struct CommonOptions {
  std::uint64_t seed = 1;
  bool seed_given = false;
  unsigned threads = 0;
};

void apply_threads(const CommonOptions& common) {
  if (common.threads > 0) wcm::set_thread_count(common.threads);
}

// --- gen-surface -----------------------------------------------------------------------------

struct GenSurfaceArgs {
  std::string model = "heston";
  std::string params;
  std::string maturities;
  std::string moneyness;
  std::string out;
};

int run_gen_surface(const GenSurfaceArgs& a) {
  if (a.model != "heston" && a.model != "rough-heston") {
    throw wcm::ValidationError("--model must be heston or rough-heston");
  }
  const json pj = parse_json_file(a.params);
  const wcm::HestonParams hp = heston_from_json(pj);
  wcm::RoughHestonParams rp;
  rp.heston = hp;
  rp.alpha = pj.value("alpha", 1.0);
  rp.steps_per_unit = pj.value("steps_per_unit", rp.steps_per_unit);
  if (a.model == "rough-heston") rp.validate();

  const auto maturities = parse_list(a.maturities, "--maturities");
  const auto moneyness = parse_list(a.moneyness, "--moneyness");

  wcm::QuoteSurface surface;
  surface.spot = hp.s0;
  for (double T : maturities) {
    if (!(T > 0.0)) throw wcm::ValidationError("maturities must be positive");
    wcm::CharFn cf;
    if (a.model == "heston") {
      cf = [&hp, T](std::complex<double> u) { return wcm::heston_cf(u, T, hp); };
    } else {
      cf = [&rp, T](std::complex<double> u) { return wcm::rough_heston_cf(u, T, rp); };
    }
    const double df = std::exp(-hp.rate * T);
    const double fwd = hp.s0 * std::exp((hp.rate - hp.dividend) * T);
    for (double m : moneyness) {
      if (!(m > 0.0)) throw wcm::ValidationError("moneyness ratios must be positive");
      wcm::Quote q;
      q.maturity = T;
      q.strike = m * hp.s0;
      q.type = wcm::OptionType::Call;
      q.price = wcm::lewis_call_price(cf, hp.s0, q.strike, T, hp.rate, hp.dividend);
      q.discount_factor = df;
      q.forward = fwd;
      q.implied_vol = wcm::implied_vol_black(*q.price, fwd, q.strike, T, df).vol;
      surface.quotes.push_back(q);
    }
  }
  wcm::emit_quotes(surface, a.out);
  std::cout << "wrote " << surface.quotes.size() << " quotes to " << a.out << '\n';
  return 0;
}

// --- calibrate -------------------------------------------------------------------------------

struct CalibrateArgs {
  std::string quotes;
  std::string config;
  std::string schedule;
  std::string out;
  std::string history;
  int max_iterations = -1;
};

void write_history(const std::vector<wcm::HistoryRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "iteration,loss,best_loss,seconds,resimulated\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << r.loss << ',' << r.best_loss << ',' << r.seconds << ',' << (r.resimulated ? 1 : 0)
        << '\n';
  }
}

int run_calibrate(const CalibrateArgs& a, const CommonOptions& common) {
  const auto surface = wcm::parse_quotes(a.quotes);
  auto run = wcm::load_run_config(a.config);
  if (common.seed_given) run.calibration.seed = common.seed;
  if (a.max_iterations >= 0) run.calibration.max_iterations = a.max_iterations;
  run.calibration.validate();
  const auto schedule = wcm::load_schedule(a.schedule);

  const auto model0 = wcm::initial_model(surface.spot, run.shape.order, run.shape.components, run.shape.basis,
                                         run.calibration);
  std::vector<wcm::HistoryRow> history;
  const auto started = std::chrono::steady_clock::now();
  try {
    const auto result = wcm::calibrate(model0, surface, run.calibration, schedule, &history);
    if (!a.history.empty()) write_history(history, a.history);
    wcm::Provenance prov{{"seed", std::to_string(run.calibration.seed)},
                         {"quotes", a.quotes},
                         {"best_iteration", std::to_string(result.best_iteration)},
                         {"best_loss", std::to_string(result.best_loss)}};
    wcm::save_model(result.model, a.out, prov);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::cout << "best loss " << result.best_loss << " at iteration " << result.best_iteration << " ("
              << history.size() << " iterations, " << std::fixed << std::setprecision(1) << secs << " s"
              << (result.stopped_by_patience ? ", stopped by patience" : "") << ")\n";
  } catch (...) {
    if (!a.history.empty()) write_history(history, a.history);
    throw;
  }
  return 0;
}

// --- price / evaluate ------------------------------------------------------------------------

struct PriceArgs {
  std::string model;
  std::string quotes;
  std::string schedule;
  std::string out;
  std::string report;
};

wcm::PricingSchedule schedule_or_default(const std::string& path, const wcm::ChaosModel& model) {
  if (!path.empty()) return wcm::load_schedule(path);
  wcm::PricingSchedule s;
  s.fallback = wcm::PricingMethod::monte_carlo(100000, model.basis().is_piecewise() ? 2 : 1);
  return s;
}

struct Evaluation {
  wcm::QuoteSurface surface;
  std::vector<wcm::PriceEstimate> prices;
  std::vector<double> model_vols;
  std::vector<double> errors_bp;
};

Evaluation evaluate_quotes(const PriceArgs& a, const CommonOptions& common) {
  Evaluation ev;
  const auto model = wcm::load_model(a.model);
  ev.surface = wcm::parse_quotes(a.quotes);
  const auto schedule = schedule_or_default(a.schedule, model);
  wcm::StreamPlan streams;
  streams.seed = common.seed;
  ev.prices = wcm::price_surface(model, ev.surface, schedule, streams, true);
  ev.errors_bp = wcm::implied_vol_errors_bp(ev.surface, ev.prices);
  for (std::size_t i = 0; i < ev.surface.quotes.size(); ++i) {
    const auto& q = ev.surface.quotes[i];
    double vol = std::nan("");  // model price outside the no-arbitrage bounds
    try {
      vol = wcm::implied_vol_black(ev.prices[i].price, *q.forward, q.strike, q.maturity, *q.discount_factor).vol;
    } catch (const wcm::InversionError&) {
    }
    ev.model_vols.push_back(vol);
  }
  return ev;
}

int run_price(const PriceArgs& a, const CommonOptions& common) {
  const auto ev = evaluate_quotes(a, common);
  auto out = open_out(a.out);
  out << "maturity_years,strike,option_type,market_call_price,model_call_price,model_std_error,market_iv,model_iv,"
         "abs_error_bp\n";
  for (std::size_t i = 0; i < ev.surface.quotes.size(); ++i) {
    const auto& q = ev.surface.quotes[i];
    out << q.maturity << ',' << q.strike << ',' << (q.type == wcm::OptionType::Call ? 'C' : 'P') << ','
        << q.call_price() << ',' << ev.prices[i].price << ',' << ev.prices[i].std_error << ','
        << q.implied_vol.value_or(std::nan("")) << ',' << ev.model_vols[i] << ',' << ev.errors_bp[i] << '\n';
  }
  std::cout << "priced " << ev.surface.quotes.size() << " quotes to " << a.out << '\n';
  return 0;
}

int run_evaluate(const PriceArgs& a, const CommonOptions& common) {
  const auto ev = evaluate_quotes(a, common);
  std::map<double, std::pair<double, int>> by_maturity;
  double total = 0.0;
  for (std::size_t i = 0; i < ev.surface.quotes.size(); ++i) {
    auto& slot = by_maturity[ev.surface.quotes[i].maturity];
    slot.first += ev.errors_bp[i];
    slot.second += 1;
    total += ev.errors_bp[i];
  }
  json report;
  report["model"] = a.model;
  report["quotes"] = a.quotes;
  report["seed"] = common.seed;
  json rows = json::array();
  for (const auto& [T, s] : by_maturity) {
    rows.push_back({{"maturity", T}, {"count", s.second}, {"mae_bp", s.first / s.second}});
  }
  report["maturities"] = rows;
  report["count"] = ev.surface.quotes.size();
  report["mae_bp"] = ev.surface.quotes.empty() ? 0.0 : total / static_cast<double>(ev.surface.quotes.size());
  auto out = open_out(a.report);
  out << report.dump(2) << '\n';
  std::cout << "overall MAE " << report["mae_bp"].get<double>() << " bp over " << ev.surface.quotes.size()
            << " quotes\n";
  return 0;
}

// --- exotics ---------------------------------------------------------------------------------

struct ExoticsArgs {
  std::string model;
  std::string spec;
  std::string reference;
  std::string out;
  std::size_t paths = 20000;
  int steps_per_unit = 128;
};

struct NamedContract {
  std::string name;
  wcm::ExoticSpec spec;
};

std::vector<NamedContract> contracts_from_json(const json& j, double s0) {
  if (!j.contains("contracts") || !j["contracts"].is_array()) {
    throw wcm::ConfigError("exotics spec needs a \"contracts\" array");
  }
  std::vector<NamedContract> out;
  for (const auto& c : j["contracts"]) {
    const std::string type = c.value("type", "");
    const double T = c.value("maturity", 0.0);
    if (!(T > 0.0)) throw wcm::ConfigError("exotic contract needs a positive maturity");
    NamedContract nc;
    if (type == "forward_start") {
      wcm::ForwardStart f{c.value("start", 0.0), T, c.value("strike", 1.0), c.value("relative", true)};
      nc.spec = f;
    } else if (type == "down_and_out") {
      // strike and barrier may be given as ratios to spot
      const double K = c.contains("strike_ratio") ? c["strike_ratio"].get<double>() * s0 : c.value("strike", s0);
      const double L = c.contains("barrier_ratio") ? c["barrier_ratio"].get<double>() * s0 : c.value("barrier", 0.0);
      nc.spec = wcm::DownAndOut{T, K, L};
    } else if (type == "lookback") {
      nc.spec = wcm::Lookback{T};
    } else {
      throw wcm::ConfigError("unknown exotic type '" + type + "'");
    }
    nc.name = c.value("name", type);
    out.push_back(nc);
  }
  return out;
}

double implied_or_nan(double price, const wcm::ExoticSpec& spec, const wcm::MarketParams& market) {
  try {
    return wcm::exotic_implied_vol(price, spec, market).vol;
  } catch (const wcm::InversionError&) {
    return std::nan("");
  }
}

int run_exotics(const ExoticsArgs& a, const CommonOptions& common) {
  const auto model = wcm::load_model(a.model);
  const auto ref = heston_from_json(parse_json_file(a.reference));
  if (ref.rate != ref.dividend) {
    throw wcm::ValidationError("exotics: the chaos model carries no drift; reference rate must equal dividend");
  }
  const auto contracts = contracts_from_json(parse_json_file(a.spec), model.s0());

  double t_max = 0.0;
  std::vector<double> extra;
  for (const auto& c : contracts) {
    const double T = wcm::exotic_maturity(c.spec);
    t_max = std::max(t_max, T);
    extra.push_back(T);
    if (const auto* f = std::get_if<wcm::ForwardStart>(&c.spec); f && f->start > 0.0) extra.push_back(f->start);
  }
  if (t_max > model.horizon()) throw wcm::DomainError("exotics: a contract matures beyond the model horizon");
  const auto grid = wcm::monitoring_grid(t_max, a.steps_per_unit, extra);

  wcm::BrownianDriver driver;
  driver.seed = common.seed;
  driver.stream = 0x40000000u;
  const auto chaos_paths = wcm::path_grid(model, grid, a.paths, driver);
  const auto heston_paths = wcm::heston_simulate(ref, grid, a.paths, driver.with_stream(0x40000001u));

  const wcm::MarketParams market{model.s0(), ref.rate, ref.dividend};
  const wcm::MarketParams ref_market{ref.s0, ref.rate, ref.dividend};
  auto out = open_out(a.out);
  out << "name,maturity,chaos_price,chaos_std_error,chaos_bs_vol,heston_price,heston_std_error,heston_bs_vol\n";
  for (const auto& c : contracts) {
    const auto pc = wcm::exotic_mc_price(chaos_paths, model.s0(), c.spec, ref.rate);
    const auto ph = wcm::exotic_mc_price(heston_paths, ref.s0, c.spec, ref.rate);
    out << c.name << ',' << wcm::exotic_maturity(c.spec) << ',' << pc.price << ',' << pc.std_error << ','
        << implied_or_nan(pc.price, c.spec, market) << ',' << ph.price << ',' << ph.std_error << ','
        << implied_or_nan(ph.price, c.spec, ref_market) << '\n';
  }
  std::cout << "priced " << contracts.size() << " contracts on " << a.paths << " paths to " << a.out << '\n';
  return 0;
}

// --- parity ----------------------------------------------------------------------------------

int run_parity(const std::string& quotes_path, const std::string& out_path) {
  const auto raw = wcm::parse_quotes(quotes_path, false);
  std::vector<std::pair<double, wcm::ParityFit>> fits;
  const auto enriched = wcm::enrich_with_parity(raw, &fits);
  wcm::emit_quotes(enriched, out_path);
  std::cout << std::setprecision(10);
  for (const auto& [T, f] : fits) {
    std::cout << "T=" << T << " DF=" << f.discount_factor << " F=" << f.forward << " q="
              << wcm::implied_dividend_yield(enriched.spot, T, f.discount_factor, f.forward)
              << " rms=" << f.residual_rms << " strikes=" << f.strikes_used << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wiener chaos martingale models: generation, calibration, pricing"};
  app.require_subcommand(1);

  CommonOptions common;
  auto* seed_opt = app.add_option("--seed", common.seed, "Seed for all random streams")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (0 = hardware concurrency)");

  GenSurfaceArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-surface", "Reference call surface from a (rough) Heston model");
  gen_cmd->add_option("--model", gen.model, "heston or rough-heston")->capture_default_str();
  gen_cmd->add_option("--params", gen.params, "Model parameters JSON")->required();
  gen_cmd->add_option("--maturities", gen.maturities, "Comma-separated maturities in years")->required();
  gen_cmd->add_option("--moneyness", gen.moneyness, "Comma-separated strike / spot ratios")->required();
  gen_cmd->add_option("--out", gen.out, "Quote CSV to write")->required();

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit a chaos model to a quote surface");
  cal_cmd->add_option("--quotes", cal.quotes)->required();
  cal_cmd->add_option("--config", cal.config, "Model shape and optimizer JSON")->required();
  cal_cmd->add_option("--schedule", cal.schedule, "Per-maturity pricing schedule JSON")->required();
  cal_cmd->add_option("--out", cal.out, "Model JSON to write")->required();
  cal_cmd->add_option("--history", cal.history, "Loss history CSV (written even on failure)");
  cal_cmd->add_option("--max-iterations", cal.max_iterations, "Override the configured iteration cap");

  PriceArgs price;
  auto* price_cmd = app.add_subcommand("price", "Price quotes under a model on evaluation streams");
  price_cmd->add_option("--model", price.model)->required();
  price_cmd->add_option("--quotes", price.quotes)->required();
  price_cmd->add_option("--schedule", price.schedule, "Pricing schedule JSON (default: MC with control variate)");
  price_cmd->add_option("--out", price.out)->required();

  PriceArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Implied-vol MAE report per maturity");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--quotes", eval.quotes)->required();
  eval_cmd->add_option("--schedule", eval.schedule);
  eval_cmd->add_option("--report", eval.report)->required();

  ExoticsArgs exo;
  auto* exo_cmd = app.add_subcommand("exotics", "Exotic prices and BS implied vols, chaos model vs Heston");
  exo_cmd->add_option("--model", exo.model)->required();
  exo_cmd->add_option("--spec", exo.spec, "Contracts JSON")->required();
  exo_cmd->add_option("--reference", exo.reference, "Heston parameters JSON")->required();
  exo_cmd->add_option("--out", exo.out)->required();
  exo_cmd->add_option("--paths", exo.paths)->capture_default_str();
  exo_cmd->add_option("--steps-per-unit", exo.steps_per_unit, "Monitoring points per year")->capture_default_str();

  std::string parity_in, parity_out;
  auto* parity_cmd = app.add_subcommand("parity", "Fill discount factors and forwards from put-call parity");
  parity_cmd->add_option("--quotes", parity_in)->required();
  parity_cmd->add_option("--out", parity_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  common.seed_given = seed_opt->count() > 0;

  try {
    apply_threads(common);
    if (*gen_cmd) return run_gen_surface(gen);
    if (*cal_cmd) return run_calibrate(cal, common);
    if (*price_cmd) return run_price(price, common);
    if (*eval_cmd) return run_evaluate(eval, common);
    if (*exo_cmd) return run_exotics(exo, common);
    if (*parity_cmd) return run_parity(parity_in, parity_out);
  } catch (const wcm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const wcm::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::overflow_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
