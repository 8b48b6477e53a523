#include "lgkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lgkit {

Report Report::from_defects(std::string op, std::vector<double> defects, double tol) {
  Report r;
  r.op = std::move(op);
  r.samples = defects.size();
  r.tol = tol;
  bool finite = true;
  double sum = 0.0;
  for (double d : defects) {
    if (!std::isfinite(d)) {
      finite = false;
      continue;
    }
    r.max_defect = std::max(r.max_defect, d);
    sum += d;
  }
  if (!finite) r.max_defect = std::numeric_limits<double>::infinity();
  r.mean_defect = defects.empty() ? 0.0 : sum / static_cast<double>(defects.size());
  r.pass = finite && r.max_defect < tol;
  r.defects = std::move(defects);
  return r;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["op"] = op;
  j["samples"] = samples;
  j["max_defect"] = std::isfinite(max_defect) ? nlohmann::json(max_defect) : nlohmann::json("inf");
  j["mean_defect"] = mean_defect;
  j["tol"] = tol;
  j["pass"] = pass;
  if (!details.empty()) j["details"] = details;
  return j;
}

std::string Report::defects_csv() const {
  std::string out = "sample_index,defect\n";
  char buf[64];
  for (std::size_t i = 0; i < defects.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, defects[i]);
    out += buf;
  }
  return out;
}

Report merge_reports(std::string op, const std::vector<Report>& parts, double tol) {
  std::vector<double> all;
  nlohmann::json details = nlohmann::json::object();
  bool pass = true;
  for (const auto& p : parts) {
    all.insert(all.end(), p.defects.begin(), p.defects.end());
    details[p.op] = p.to_json();
    pass = pass && p.pass;
  }
  Report r = Report::from_defects(std::move(op), std::move(all), tol);
  r.pass = pass && !parts.empty();
  r.details = std::move(details);
  return r;
}

}  // namespace lgkit
