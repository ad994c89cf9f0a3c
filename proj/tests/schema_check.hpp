// Minimal structural validator for the shipped report schema: checks the
// required-key lists and primitive types of the matching definition. Not a
// general JSON-schema engine; enough to keep reports and schema in sync.
#pragma once

#include <fstream>
#include <string>

#include "json.hpp"

namespace schema_check {

using nlohmann::json;

inline json load_schema(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

inline bool type_ok(const json& spec, const json& value) {
  if (spec.contains("const")) return value == spec["const"];
  if (spec.contains("enum")) {
    for (const auto& v : spec["enum"])
      if (v == value) return true;
    return false;
  }
  if (!spec.contains("type")) return true;
  const std::string t = spec["type"];
  if (t == "number") {
    if (!value.is_number()) return false;
    if (spec.contains("minimum") &&
        value.get<double>() < spec["minimum"].get<double>())
      return false;
    if (spec.contains("maximum") &&
        value.get<double>() > spec["maximum"].get<double>())
      return false;
    return true;
  }
  if (t == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (t == "boolean") return value.is_boolean();
  if (t == "string") return value.is_string();
  if (t == "array") return value.is_array();
  if (t == "object") return value.is_object();
  return true;
}

inline void check_against(const json& schema, const std::string& definition,
                          const json& report) {
  const json& def = schema["definitions"].at(definition);
  REQUIRE(def.contains("required"));
  for (const auto& key : def["required"]) {
    INFO("required key: " << key.get<std::string>());
    CHECK(report.contains(key.get<std::string>()));
  }
  if (!def.contains("properties")) return;
  for (const auto& [key, spec] : def["properties"].items()) {
    if (!report.contains(key)) continue;
    if (spec.contains("$ref")) {
      const std::string ref = spec["$ref"];
      const std::string name = ref.substr(ref.rfind('/') + 1);
      check_against(schema, name, report.at(key));
      continue;
    }
    INFO("property: " << key);
    CHECK(type_ok(spec, report.at(key)));
  }
}

}  // namespace schema_check
