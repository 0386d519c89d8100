#pragma once

#include <string>

#include "wcm/basis.hpp"
#include "wcm/calibrate.hpp"
#include "wcm/pricing.hpp"

namespace wcm {

/// Schedule JSON:
///   {"fallback": {"method": "mc", "n_paths": 100000, "cv_degree": 2, "cv_sample_size": 10000},
///    "maturities": [{"maturity": 0.25, "method": "quad", "n_nodes": 40, "dimension_cap": 4}, ...]}
PricingSchedule schedule_from_json(const std::string& text);
std::string schedule_to_json(const PricingSchedule& schedule);
PricingSchedule load_schedule(const std::string& path);

/// Model shape for a calibration run.
struct ModelShape {
  int order = 2;
  int components = 2;
  BasisSpec basis = BasisSpec::uniform_piecewise(1.0, 4);
};

/// Calibration config JSON: optimizer fields named as in CalibrationConfig plus
///   "order", "components",
///   "basis": {"kind": "piecewise", "grid": [...]} | {"kind": "piecewise", "horizon": h, "cells": n}
///          | {"kind": "legendre", "horizon": h, "count": n}.
/// Missing fields keep their defaults.
struct RunConfig {
  CalibrationConfig calibration;
  ModelShape shape;
};

RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

BasisSpec basis_from_json(const std::string& text);
std::string basis_to_json(const BasisSpec& basis);

std::string read_text_file(const std::string& path);

}  // namespace wcm
