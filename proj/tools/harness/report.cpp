#include "linkgcn/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

namespace linkgcn::harness {

namespace {

void require_number(const json& obj, const char* key, const std::string& where,
                    std::vector<std::string>& errors, bool unit_interval = false) {
  if (!obj.contains(key)) {
    errors.push_back(where + key + " is missing");
    return;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    errors.push_back(where + key + " must be a number");
    return;
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) errors.push_back(where + key + " must be finite");
  if (unit_interval && (x < 0.0 || x > 1.0)) errors.push_back(where + key + " must lie in [0, 1]");
}

void require_count(const json& obj, const char* key, const std::string& where,
                   std::vector<std::string>& errors) {
  const bool ok = obj.contains(key) && obj.at(key).is_number_integer() &&
                  (obj.at(key).is_number_unsigned() || obj.at(key).get<std::int64_t>() >= 0);
  if (!ok) {
    errors.push_back(where + key + " must be a nonnegative integer");
  }
}

}  // namespace

std::vector<std::string> validate_eval_report(const json& report) {
  std::vector<std::string> errors;
  if (!report.is_object()) return {"report must be a JSON object"};
  for (const char* key : {"dataset", "method"}) {
    if (!report.contains(key) || !report.at(key).is_string()) {
      errors.push_back(std::string(key) + " must be a string");
    }
  }
  require_count(report, "seed", "", errors);
  require_number(report, "ap", "", errors, true);
  require_number(report, "runtime_s", "", errors);
  if (report.contains("runtime_s") && report.at("runtime_s").is_number() &&
      report.at("runtime_s").get<double>() < 0.0) {
    errors.push_back("runtime_s must be >= 0");
  }
  if (!report.contains("bcubed") || !report.at("bcubed").is_object()) {
    errors.push_back("bcubed must be an object");
  } else {
    const json& b = report.at("bcubed");
    for (const char* key : {"p", "r", "f", "tau"}) require_number(b, key, "bcubed.", errors, true);
  }
  if (!report.contains("degeneracy") || !report.at("degeneracy").is_object()) {
    errors.push_back("degeneracy must be an object");
  } else {
    const json& d = report.at("degeneracy");
    require_count(d, "single_class_pools", "degeneracy.", errors);
    require_count(d, "clamps", "degeneracy.", errors);
  }
  return errors;
}

json aggregate_cells(const std::vector<json>& cells) {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, std::vector<double>> aps;
  std::size_t failed = 0;
  const auto note = [](std::vector<std::string>& list, const std::string& v) {
    if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
  };
  for (const auto& cell : cells) {
    const std::string ds = cell.at("dataset").get<std::string>();
    const std::string method = cell.at("method").get<std::string>();
    note(datasets, ds);
    note(methods, method);
    if (cell.value("status", "ok") != "ok") {
      ++failed;
      continue;
    }
    aps[{method, ds}].push_back(cell.at("ap").get<double>());
  }

  json table = json::array();
  for (const auto& method : methods) {
    json row;
    row["method"] = method;
    json per_dataset = json::object();
    double sum = 0.0;
    std::size_t present = 0;
    for (const auto& ds : datasets) {
      const auto it = aps.find({method, ds});
      if (it == aps.end() || it->second.empty()) {
        per_dataset[ds] = nullptr;
        continue;
      }
      double s = 0.0;
      for (const double v : it->second) s += v;
      const double mean = s / static_cast<double>(it->second.size());
      per_dataset[ds] = {{"mean_ap", mean}, {"seeds", it->second.size()}};
      sum += mean;
      ++present;
    }
    row["datasets"] = per_dataset;
    row["avg"] = present > 0 ? json(sum / static_cast<double>(present)) : json(nullptr);
    row["complete"] = present == datasets.size();
    table.push_back(row);
  }
  return {{"datasets", datasets}, {"methods", methods}, {"table", table},
          {"cells", cells},       {"failed_cells", failed}};
}

std::string render_table_tsv(const json& report) {
  std::ostringstream out;
  out << "method";
  for (const auto& ds : report.at("datasets")) out << '\t' << ds.get<std::string>();
  out << "\tAvg\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& row : report.at("table")) {
    out << row.at("method").get<std::string>();
    for (const auto& ds : report.at("datasets")) {
      const json& cell = row.at("datasets").at(ds.get<std::string>());
      out << '\t';
      if (cell.is_null()) {
        out << "failed";
      } else {
        out << cell.at("mean_ap").get<double>();
      }
    }
    out << '\t';
    if (row.at("avg").is_null()) {
      out << "n/a";
    } else {
      out << row.at("avg").get<double>();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace linkgcn::harness
