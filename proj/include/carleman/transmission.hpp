// SPDX-License-Identifier: Apache-2.0
//
// The matrix T built from conjugated transmission symbols and shifted kappa
// factors, the rank test for the transmission condition, and scans over
// weight-parameter families.

#ifndef CARLEMAN_TRANSMISSION_HPP
#define CARLEMAN_TRANSMISSION_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carleman/conditions.hpp"
#include "carleman/polynomial.hpp"
#include "carleman/sampling.hpp"
#include "carleman/symbols.hpp"

namespace carleman {

struct TransmissionOptions {
  /// Root classification tolerance; per-polynomial default when empty.
  std::optional<double> eps_im;
  std::optional<double> delta;
  double tol_rank = 1e-8;
};

/// 2m x (m + m_left^- + m_right^-) matrix. Rows: xi_n^0..xi_n^{m_l - 1}
/// coefficients of the left side, then the right side. Columns: the m
/// transmission symbols, then the shifted kappa factors of each side.
struct TransmissionMatrix {
  Eigen::MatrixXcd entries;
  /// Singular values of the column-normalized matrix, descending.
  Eigen::VectorXd singular_values;
  int m = 0;
  std::array<int, 2> order{0, 0};
  std::array<int, 2> m_minus{0, 0};
  std::array<Split, 2> splits;
  std::array<ComplexPolynomial, 2> kappa;

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
  /// sigma_{2m} / sigma_1, or 0 with fewer than 2m columns.
  double sigma_ratio() const;
  /// det of `entries` when square.
  std::optional<Complex> determinant() const;
};

/// Assembles T at the normalized quadruple.
TransmissionMatrix assemble_T(const Scenario& scn, const InterfaceQuadruple& q,
                              const TransmissionOptions& options = {});

/// Assembles T at an interface point without normalizing (xi', tau).
TransmissionMatrix assemble_T_at(const Scenario& scn, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& xi_tangential, double tau,
                                 const TransmissionOptions& options = {});

struct TransmissionVerdict {
  Verdict verdict = Verdict::indeterminate;
  double sigma_ratio = 0.0;
  bool necessary_count_ok = false;
  Eigen::VectorXd worst_x;
  Eigen::VectorXd worst_xi;
  double worst_tau = 0.0;
  std::array<int, 2> m_minus{0, 0};
  int columns = 0;
  /// Classification tolerances used at the worst quadruple (left, right).
  std::array<double, 2> eps_im{0.0, 0.0};
  std::optional<Complex> determinant;
  std::size_t samples_evaluated = 1;
};

/// Rank verdict at one quadruple. Throws std::logic_error if a "holds"
/// verdict ever violates m_left^- + m_right^- >= m.
TransmissionVerdict check_transmission_at(const Scenario& scn, const InterfaceQuadruple& q,
                                          const TransmissionOptions& options = {});

struct TransmissionSampler {
  int count = 512;
  std::uint64_t seed = 0;
  RefineOptions refine;
};

/// Worst verdict over the hemisphere |(xi', tau)| = 1, tau >= 0.
TransmissionVerdict check_transmission_point(const Scenario& scn, const Eigen::VectorXd& x0,
                                             const TransmissionSampler& sampler = {},
                                             const TransmissionOptions& options = {});

struct ParamAxis {
  std::string name;
  std::vector<double> values;
};

/// "name=a:b:n" (n points from a to b) or "name=v".
ParamAxis parse_param_axis(const std::string& text);

struct ScanCell {
  ParamMap params;
  TransmissionVerdict result;
};

struct ScanBoundary {
  std::string axis;
  /// Other parameter values identifying the grid line.
  ParamMap fixed;
  double last_holds = 0.0;
  double first_other = 0.0;
};

struct ScanResult {
  std::vector<ParamAxis> axes;
  /// Row-major over the axes (last axis fastest).
  std::vector<ScanCell> cells;
  std::vector<ScanBoundary> boundaries;
};

using ScenarioFactory = std::function<Scenario(const ParamMap&)>;

ScanResult scan_weight_family(const ScenarioFactory& factory, const std::vector<ParamAxis>& axes,
                              const TransmissionSampler& sampler = {},
                              const TransmissionOptions& options = {});

}  // namespace carleman

#endif  // CARLEMAN_TRANSMISSION_HPP
