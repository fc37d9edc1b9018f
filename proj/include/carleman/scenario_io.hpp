// SPDX-License-Identifier: Apache-2.0
//
// Scenario files: a plain INI-style document with repeated keys allowed.
//
//   [problem]        name, n, m_left, m_right, x0, eigenvalue_shift, relaxed_orders
//   [params]         name = value (overridable from the command line)
//   [operator.left]  term = <alpha...> : <coefficient expression>   (repeated)
//   [operator.right]
//   [transmission.j] left_order, right_order, left = <term>, right = <term>
//   [weight]         kind = direct | two_parameter, left, right, gamma
//   [region]         left_points, right_points ("x1 x2; x1 x2"), samples, seed
//   [estimator]      length, grid_n, tau, gamma, tau_gamma, xi, mode
//
// Lists are space separated or a:b:n ranges.

#ifndef CARLEMAN_SCENARIO_IO_HPP
#define CARLEMAN_SCENARIO_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carleman/error.hpp"
#include "carleman/estimator.hpp"
#include "carleman/symbols.hpp"

namespace carleman {

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;
  int line = 0;
  std::vector<IniEntry> entries;

  const IniEntry* find(const std::string& key) const;
  std::vector<const IniEntry*> all(const std::string& key) const;
};

struct IniDocument {
  std::string source;
  std::vector<IniSection> sections;

  /// '#' and ';' start comments at line start; '#' also after a value.
  static IniDocument parse(const std::string& text, const std::string& source);
  const IniSection* find(const std::string& name) const;
};

/// Error with "source:line: [section] message" context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// "a:b:n" or a whitespace separated list of numbers.
std::vector<double> parse_number_list(const std::string& text);

struct RegionConfig {
  std::vector<Eigen::VectorXd> left_points;
  std::vector<Eigen::VectorXd> right_points;
  int samples = 2048;
  std::uint64_t seed = 0;
};

struct EstimatorConfig {
  double length = 1.0;
  int grid_n = 400;
  std::vector<double> taus;
  std::vector<double> gammas;
  std::vector<double> xi_samples;
  /// When set, tau = tau_gamma / gamma for each gamma.
  std::optional<double> tau_gamma;
  EstimateMode mode = EstimateMode::standard;
};

class ScenarioTemplate {
 public:
  static ScenarioTemplate parse(const std::string& text, const std::string& source);
  static ScenarioTemplate load(const std::string& path);

  /// Builds and validates the scenario. Unknown override names throw.
  Scenario instantiate(const ParamMap& overrides = {}) const;

  const std::string& name() const { return name_; }
  const ParamMap& defaults() const { return params_; }
  bool has_param(const std::string& name) const { return params_.count(name) > 0; }
  const RegionConfig& region() const { return region_; }
  const EstimatorConfig& estimator() const { return estimator_; }
  const IniDocument& document() const { return doc_; }

 private:
  IniDocument doc_;
  std::string name_;
  ParamMap params_;
  RegionConfig region_;
  EstimatorConfig estimator_;
};

std::vector<std::string> builtin_names();
std::optional<std::string> builtin_text(const std::string& name);

/// Builtin name or file path.
ScenarioTemplate resolve_scenario(const std::string& name_or_path);

/// Loads and instantiates with default parameters.
Scenario parse_scenario(const std::string& path);

}  // namespace carleman

#endif  // CARLEMAN_SCENARIO_IO_HPP
