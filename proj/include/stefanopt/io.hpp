#pragma once

#include <string>

#include <json.hpp>

#include "stefanopt/analysis.hpp"
#include "stefanopt/optimize.hpp"
#include "stefanopt/state.hpp"

namespace stefanopt {

/// %.17g rendering, enough digits to round-trip a double.
std::string fmt17(double v);

// CSV writers. Every file starts with a `#`-prefixed timestamp comment and
// a header row; all numbers use fmt17.
void write_state_csv(const std::string& path, const DiscreteStateVector& dsv);
void write_control_csv(const std::string& path, const DiscreteControl& dc);
void write_history_csv(const std::string& path, const std::vector<HistoryRow>& history);
void write_sweep_csv(const std::string& path, const SweepTable& table);

void write_json_file(const std::string& path, const nlohmann::ordered_json& j);

nlohmann::ordered_json cost_to_json(const CostBreakdown& cb);
nlohmann::ordered_json energy_to_json(const EnergyReport& er);
nlohmann::ordered_json result_to_json(const OptResult& res);

}  // namespace stefanopt
