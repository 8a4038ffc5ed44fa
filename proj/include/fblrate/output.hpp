#pragma once

// Structured output: JSON records and CSV tables. Numbers are written in the
// shortest decimal form that parses back to the same double; sweep gaps are
// JSON null and empty CSV cells.

#include "fblrate/sweeps.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace fblrate {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1.0";

std::string format_double(double value);

/// Quotes a CSV field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

struct OutputRecord {
    std::string command;
    Json parameters = Json::object();
    Json results = Json::object();
    std::optional<Json> mc_metadata;

    [[nodiscard]] Json to_json() const;
};

/// {"axis": ..., "value": ..., "rows": [{axis: x, label: y|null, ...}], "metadata": {...}}
Json sweep_to_json(const SweepTable& table);
std::string sweep_to_csv(const SweepTable& table);

/// Two-column "key,value" CSV of a flat JSON object; nested values are dumped as JSON text.
std::string object_to_csv(const Json& object);

} // namespace fblrate
