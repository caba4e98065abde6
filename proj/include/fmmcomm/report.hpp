#pragma once

// CSV and JSON renderings of the toolkit's reports. Seconds are written with
// 6 significant digits, byte and cell counts as integers.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fmmcomm/phases.hpp"
#include "fmmcomm/topology.hpp"
#include "fmmcomm/validation.hpp"

namespace fmmcomm {

std::string format_seconds(double seconds);

void write_csv(std::ostream& out, const std::vector<CommStatsRow>& rows);
nlohmann::json to_json(const TreeConfig& cfg, const std::vector<CommStatsRow>& rows);

void write_csv(std::ostream& out, const PredictionReport& report);
nlohmann::json to_json(const PredictionReport& report);

void write_csv(std::ostream& out, const ComparisonReport& report);
nlohmann::json to_json(const ComparisonReport& report);

void write_csv(std::ostream& out, const LoadBalanceReport& report);
nlohmann::json to_json(const LoadBalanceReport& report);

void write_csv(std::ostream& out, const PatternMatrix& matrix);
nlohmann::json to_json(const PatternMatrix& matrix, const Level& level, PhaseKind phase);

void write_csv(std::ostream& out, const HopAnnotatedPlan& plan);
nlohmann::json to_json(const HopAnnotatedPlan& plan);

}  // namespace fmmcomm
