#pragma once

#include <string>

#include <json.hpp>

#include "qdel/scenarios.hpp"

namespace qdel {

/// 12-significant-digit rendering used by every emitted number ("." decimal
/// separator, negative zero normalized to "0").
std::string format_number(double v);

std::string to_csv(const ScenarioReport& report);
nlohmann::json to_json(const ScenarioReport& report);
ScenarioReport scenario_report_from_json(const nlohmann::json& j);

std::string to_csv(const PaperTable& table);
nlohmann::json to_json(const PaperTable& table);
PaperTable paper_table_from_json(const nlohmann::json& j);

}  // namespace qdel
