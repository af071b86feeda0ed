#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace linkgcn::harness {

using nlohmann::json;

/// Checks an evaluation report against the published schema
/// (docs/report.schema.json). Returns one message per violation.
std::vector<std::string> validate_eval_report(const json& report);

/// Builds the method x dataset table from matrix cells.
///
/// Each (method, dataset) entry is the mean AP over that pair's successful
/// seeds; a method's "avg" is the arithmetic mean of its dataset entries.
json aggregate_cells(const std::vector<json>& cells);

/// Tab-separated rendering of an aggregated report: one row per method, one
/// AP column per dataset, then Avg.
std::string render_table_tsv(const json& report);

}  // namespace linkgcn::harness
