#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "wcm/model.hpp"

namespace wcm {

inline constexpr int kModelSchemaVersion = 1;

/// Free-form provenance stored alongside a model (seed, source file, ...).
using Provenance = std::map<std::string, std::string>;

/// JSON text of a model: schema version, shape, basis, index metadata with its order hash,
/// and coefficients written with shortest round-trip formatting (lossless).
std::string model_to_json(const ChaosModel& model, const Provenance& provenance = {});

/// Parses and validates a model. Throws ConfigError on a schema version mismatch or when the
/// stored index list or hash does not match the enumeration for (P, M, d).
ChaosModel model_from_json(const std::string& text, Provenance* provenance = nullptr);

void save_model(const ChaosModel& model, const std::string& path, const Provenance& provenance = {});
ChaosModel load_model(const std::string& path, Provenance* provenance = nullptr);

}  // namespace wcm
