#include "wcm/model_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "wcm/errors.hpp"
#include "wcm/schedule_io.hpp"

namespace wcm {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

}  // namespace

std::string model_to_json(const ChaosModel& model, const Provenance& provenance) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["s0"] = model.s0();
  j["horizon"] = model.horizon();
  j["order"] = model.order();
  j["basis_count"] = model.basis_count();
  j["components"] = model.components();
  j["basis"] = json::parse(basis_to_json(model.basis()));
  j["index_order"] = "graded-lex";
  j["index_order_hash"] = hex64(index_order_hash(model.indices()));
  json idx = json::array();
  for (const auto& a : model.indices()) idx.push_back(std::vector<int>(a.exponents().begin(), a.exponents().end()));
  j["indices"] = std::move(idx);
  j["coefficients"] = std::vector<double>(model.coefficients().begin(), model.coefficients().end());
  j["provenance"] = provenance;
  return j.dump(1);
}

ChaosModel model_from_json(const std::string& text, Provenance* provenance) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw ConfigError("model file schema_version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kModelSchemaVersion) + ")");
    }
    const auto basis = basis_from_json(j.at("basis").dump());
    const int order = j.at("order").get<int>();
    const int d = j.at("components").get<int>();
    if (j.contains("basis_count") && j["basis_count"].get<int>() != basis.size()) {
      throw ConfigError("model file basis_count does not match the basis");
    }
    ChaosModel model(j.at("s0").get<double>(), order, d, basis, j.at("coefficients").get<std::vector<double>>());
    const auto indices = model.indices();
    if (j.contains("indices")) {
      const auto& stored = j["indices"];
      if (!stored.is_array() || stored.size() != indices.size()) {
        throw ConfigError("model file index list size does not match the enumeration");
      }
      for (std::size_t k = 0; k < indices.size(); ++k) {
        const auto e = stored[k].get<std::vector<int>>();
        if (!std::equal(e.begin(), e.end(), indices[k].exponents().begin(), indices[k].exponents().end())) {
          throw ConfigError("model file index " + std::to_string(k) + " is out of enumeration order");
        }
      }
    }
    if (j.at("index_order_hash").get<std::string>() != hex64(index_order_hash(indices))) {
      throw ConfigError("model file index_order_hash does not match the enumeration");
    }
    if (provenance) {
      provenance->clear();
      if (j.contains("provenance")) *provenance = j["provenance"].get<Provenance>();
    }
    return model;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model file is malformed: ") + e.what());
  }
}

void save_model(const ChaosModel& model, const std::string& path, const Provenance& provenance) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file " + path);
  out << model_to_json(model, provenance) << '\n';
}

ChaosModel load_model(const std::string& path, Provenance* provenance) {
  return model_from_json(read_text_file(path), provenance);
}

}  // namespace wcm
