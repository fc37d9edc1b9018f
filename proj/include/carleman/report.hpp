// SPDX-License-Identifier: Apache-2.0
//
// JSON reports and CSV tables.

#ifndef CARLEMAN_REPORT_HPP
#define CARLEMAN_REPORT_HPP

#include <ostream>
#include <string>

#include <json.hpp>

#include "carleman/conditions.hpp"
#include "carleman/estimator.hpp"
#include "carleman/transmission.hpp"

namespace carleman {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const ConditionReport& r);
Json to_json(const TransmissionVerdict& v);
Json to_json(const TransmissionMatrix& t);
Json to_json(const ConditionTolerances& t);
Json to_json(const TransmissionOptions& t);
Json to_json(const EstimatePoint& p);

/// Skeleton with tool, version and scenario fields.
Json report_header(const Scenario& scn);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

/// Fixed-format number for CSV output.
std::string format_number(double v);

/// Columns: params..., verdict, sigma_ratio, worst_xi', worst_tau
void write_scan_csv(std::ostream& os, const ScanResult& scan);
/// Columns: tau, gamma, C, eps, N
void write_estimate_csv(std::ostream& os, const EstimateCurve& curve);

}  // namespace carleman

#endif  // CARLEMAN_REPORT_HPP
