#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bear/core.hpp"
#include "bear/prefix.hpp"

namespace bear {

/// A detected anomaly event: target prefix and start time, optionally an end
/// time and a human-readable name.
struct EventSpec {
  Prefix prefix;
  std::int64_t start = 0;
  std::optional<std::int64_t> end;
  std::optional<std::string> name;

  void validate() const {
    if (end && *end <= start) raise<SpecError>("event end must be after start");
  }

  bool operator==(const EventSpec&) const = default;
};

inline nlohmann::ordered_json event_spec_to_json(const EventSpec& spec) {
  nlohmann::ordered_json j;
  j["prefix"] = spec.prefix.str();
  j["start"] = spec.start;
  if (spec.end) j["end"] = *spec.end;
  if (spec.name) j["name"] = *spec.name;
  return j;
}

inline EventSpec event_spec_from_json(const nlohmann::json& j) {
  EventSpec spec{Prefix::parse(j.at("prefix").get<std::string>()),
                 j.at("start").get<std::int64_t>()};
  if (j.contains("end") && !j["end"].is_null()) spec.end = j["end"].get<std::int64_t>();
  if (j.contains("name") && !j["name"].is_null()) spec.name = j["name"].get<std::string>();
  spec.validate();
  return spec;
}

}  // namespace bear
