#pragma once

#include "json.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace lgkit {

/// Outcome of a sampled verification. `defects` keeps one value per sample
/// in sample order; `details` carries check-specific sub-results.
struct Report {
  std::string op;
  std::size_t samples = 0;
  double max_defect = 0.0;
  double mean_defect = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::vector<double> defects;
  nlohmann::json details = nlohmann::json::object();

  /// pass iff every defect is finite and strictly below tol.
  static Report from_defects(std::string op, std::vector<double> defects, double tol);

  nlohmann::json to_json() const;
  /// Rows "sample_index,defect" with header.
  std::string defects_csv() const;
};

/// Combines sub-reports: defects concatenated, pass iff all pass.
Report merge_reports(std::string op, const std::vector<Report>& parts, double tol);

}  // namespace lgkit
