#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sufcast/linalg.hpp"

namespace sufcast {

using Json = nlohmann::ordered_json;

inline constexpr int kReportVersion = 1;

/// Vector as a JSON array; non-finite entries become null.
Json to_json(const Vector& v);
/// Matrix as an array of columns.
Json columns_to_json(const Matrix& m);

/// Problems found checking a report against its documented schema (empty
/// when valid). The schema is selected by the report's "schema" field:
/// sufcast.forecast, sufcast.simulate or sufcast.factors.
std::vector<std::string> validate_report(const Json& report);

/// Writes `report` as indented JSON followed by a newline.
void write_report(const std::string& path, const Json& report);

/// Sibling path of a report: "out/run.json" + "forecasts" -> "out/run_forecasts.csv".
std::string sibling_csv(const std::string& report_path, const std::string& suffix);

}  // namespace sufcast
