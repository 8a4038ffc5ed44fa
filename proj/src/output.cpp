#include "fblrate/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace fblrate {

std::string format_double(double value)
{
    if (!std::isfinite(value)) {
        return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    }
    std::array<char, 32> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), end);
}

std::string csv_field(std::string_view text)
{
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

Json OutputRecord::to_json() const
{
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["command"] = command;
    out["parameters"] = parameters;
    out["results"] = results;
    if (mc_metadata) {
        out["mc_metadata"] = *mc_metadata;
    }
    return out;
}

Json sweep_to_json(const SweepTable& table)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < table.rows(); ++i) {
        Json row;
        row[table.axis_name] = table.axis_values[i];
        for (const auto& col : table.columns) {
            const auto& v = col.values[i];
            row[col.label] = v ? Json(*v) : Json(nullptr);
        }
        rows.push_back(std::move(row));
    }
    Json meta = Json::object();
    for (const auto& [k, v] : table.metadata) {
        meta[k] = v;
    }
    return Json{{"axis", table.axis_name}, {"value", table.value_name}, {"rows", std::move(rows)},
                {"metadata", std::move(meta)}};
}

std::string sweep_to_csv(const SweepTable& table)
{
    std::ostringstream out;
    out << csv_field(table.axis_name);
    for (const auto& col : table.columns) {
        out << ',' << csv_field(table.value_name + ":" + col.label);
    }
    out << "\r\n";
    for (std::size_t i = 0; i < table.rows(); ++i) {
        out << format_double(table.axis_values[i]);
        for (const auto& col : table.columns) {
            out << ',';
            if (const auto& v = col.values[i]) {
                out << format_double(*v);
            }
        }
        out << "\r\n";
    }
    return out.str();
}

std::string object_to_csv(const Json& object)
{
    std::ostringstream out;
    out << "key,value\r\n";
    for (const auto& [key, value] : object.items()) {
        std::string text;
        if (value.is_number_float()) {
            text = format_double(value.get<double>());
        } else if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_null()) {
            text = "";
        } else {
            text = value.dump();
        }
        out << csv_field(key) << ',' << csv_field(text) << "\r\n";
    }
    return out.str();
}

} // namespace fblrate
