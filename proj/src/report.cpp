#include "qdel/report.hpp"

#include <cstdio>

namespace qdel {

namespace {

using nlohmann::json;

json number(double v) {
  // Round through the 12-digit text form so JSON and CSV agree exactly.
  return json::parse(format_number(v));
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // collapse -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// ScenarioReport

std::string to_csv(const ScenarioReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out += ',';
    out += report.columns[i];
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  // Averages as a trailing row keyed by the first column.
  out += "average";
  for (std::size_t i = 1; i < report.columns.size(); ++i) {
    out += ',';
    for (const auto& [name, value] : report.averages) {
      if (name == report.columns[i]) {
        out += format_number(value);
        break;
      }
    }
  }
  out += '\n';
  return out;
}

json to_json(const ScenarioReport& report) {
  json j;
  j["scenario"] = report.scenario;
  j["machine"] = report.machine;
  j["convention"] = report.convention;
  j["columns"] = report.columns;
  j["rows"] = json::array();
  for (const auto& row : report.rows) {
    json r = json::array();
    for (double v : row) r.push_back(number(v));
    j["rows"].push_back(std::move(r));
  }
  j["averages"] = json::object();
  for (const auto& [name, value] : report.averages) j["averages"][name] = number(value);
  j["meta"] = json::object();
  for (const auto& [name, value] : report.meta) j["meta"][name] = number(value);
  return j;
}

ScenarioReport scenario_report_from_json(const json& j) {
  ScenarioReport report;
  report.scenario = j.at("scenario").get<std::string>();
  report.machine = j.at("machine").get<std::string>();
  report.convention = j.at("convention").get<std::string>();
  report.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    report.rows.push_back(row.get<std::vector<double>>());
  }
  // Preserve column order for averages so CSV regeneration is byte-stable.
  for (std::size_t i = 1; i < report.columns.size(); ++i) {
    const auto& name = report.columns[i];
    if (j.at("averages").contains(name)) {
      report.averages.emplace_back(name, j.at("averages").at(name).get<double>());
    }
  }
  for (const auto& [key, value] : j.at("meta").items()) {
    report.meta.emplace_back(key, value.get<double>());
  }
  return report;
}

// ---------------------------------------------------------------------------
// PaperTable

std::string to_csv(const PaperTable& table) {
  std::string out = "quantity,paper_value,simulated,abs_error,convention\n";
  for (const auto& row : table.rows) {
    out += row.quantity;
    out += ',';
    out += format_number(row.paper_value);
    out += ',';
    out += format_number(row.simulated);
    out += ',';
    out += format_number(row.abs_error);
    out += ',';
    out += row.convention;
    out += '\n';
  }
  return out;
}

json to_json(const PaperTable& table) {
  json j;
  j["columns"] = {"quantity", "paper_value", "simulated", "abs_error", "convention"};
  j["rows"] = json::array();
  for (const auto& row : table.rows) {
    j["rows"].push_back({{"quantity", row.quantity},
                         {"paper_value", number(row.paper_value)},
                         {"simulated", number(row.simulated)},
                         {"abs_error", number(row.abs_error)},
                         {"convention", row.convention}});
  }
  j["notes"] = table.notes;
  j["max_abs_error"] = number(table.max_error());
  return j;
}

PaperTable paper_table_from_json(const json& j) {
  PaperTable table;
  for (const auto& row : j.at("rows")) {
    table.rows.push_back({row.at("quantity").get<std::string>(),
                          row.at("paper_value").get<double>(),
                          row.at("simulated").get<double>(), row.at("abs_error").get<double>(),
                          row.at("convention").get<std::string>()});
  }
  table.notes = j.at("notes").get<std::vector<std::string>>();
  return table;
}

}  // namespace qdel
