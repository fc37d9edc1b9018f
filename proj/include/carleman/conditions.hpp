// SPDX-License-Identifier: Apache-2.0
//
// Region-level verdicts for ellipticity, sub-ellipticity, strong
// pseudo-convexity and the simple-characteristic property, by sampling the
// (co)sphere over a finite set of base points.

#ifndef CARLEMAN_CONDITIONS_HPP
#define CARLEMAN_CONDITIONS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carleman/sampling.hpp"
#include "carleman/symbols.hpp"

namespace carleman {

enum class Verdict { holds, fails, indeterminate };

const char* to_string(Verdict v);
/// fails < indeterminate < holds
Verdict worst(Verdict a, Verdict b);

/// holds if margin > t, fails if margin < -t, indeterminate otherwise.
Verdict verdict_from_margin(double margin, double fail_threshold);

struct SampleRegion {
  std::vector<Eigen::VectorXd> points;
  int n_sphere = 2048;
  std::uint64_t seed = 0;
  /// Restrict sub-ellipticity samples to tau = 0.
  bool tau_zero_only = false;
  RefineOptions refine;
};

struct ConditionTolerances {
  double ellipticity = 1e-8;
  double ellipticity_fail = 1e-9;
  double subellipticity = 1e-4;
  double subellipticity_fail = 1e-6;
  double pseudoconvexity = 1e-4;
  double pseudoconvexity_fail = 1e-6;
  double simple_characteristic = 1e-4;
  double simple_characteristic_fail = 1e-6;
  std::vector<double> penalty_grid{1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
};

struct Witness {
  Eigen::VectorXd x;
  Eigen::VectorXd xi;
  std::optional<double> tau;
};

struct ConditionReport {
  std::string check;
  Side side = Side::right;
  Verdict verdict = Verdict::indeterminate;
  /// quantity - tolerance
  double margin = 0.0;
  /// Worst sampled value of the defining quantity.
  double quantity = 0.0;
  double tolerance = 0.0;
  double fail_threshold = 0.0;
  Witness witness;
  std::size_t samples_evaluated = 0;
  /// Check-specific extras such as the selected penalty weights.
  std::map<std::string, double> details;
  bool finite_difference = false;
};

/// min |p(x, xi)| over |xi| = 1.
ConditionReport check_ellipticity(const OperatorSpec& op, const SampleRegion& region,
                                  const ConditionTolerances& tol = {});

/// max over M of inf ({a,b} + M |p_phi|^2) on |(xi, tau)| = 1, tau >= 0.
/// Throws Error if phi' vanishes at a base point.
ConditionReport check_subellipticity(const Scenario& scn, Side side, const SampleRegion& region,
                                     const ConditionTolerances& tol = {});

/// max over (M1, M2) of inf ((1/2i){conj p, p} + M1 |p|^2 + M2 |{p, psi}|^2)
/// at xi + i tau psi', on |(xi, tau)| = 1, tau >= 0.
ConditionReport check_strong_pseudoconvexity(const Scenario& scn, Side side,
                                             const SampleRegion& region,
                                             const ConditionTolerances& tol = {});

/// min over unit xi and root pairs (t_j, t_k) of rho(t) = p(x, xi + i t psi')
/// of max(|t_j - t_k|, dist((t_j + t_k)/2, [0, inf))), scaled by |psi'|.
ConditionReport check_simple_characteristic(const Scenario& scn, Side side,
                                            const SampleRegion& region,
                                            const ConditionTolerances& tol = {});

/// The simple-characteristic quantity for one (x, xi), unscaled roots.
double simple_characteristic_quantity(const FrozenSymbol& p, const Eigen::VectorXd& psi_grad,
                                      const Eigen::VectorXd& xi);

struct GammaSearch {
  Verdict verdict = Verdict::indeterminate;
  /// First gamma = 2^k (k <= 16) at which sub-ellipticity holds.
  std::optional<double> gamma_star;
  std::vector<std::pair<double, ConditionReport>> trail;
};

/// Doubling search over gamma in two-parameter mode.
GammaSearch find_gamma_star(const Scenario& scn, Side side, const SampleRegion& region,
                            const ConditionTolerances& tol = {}, int max_power = 16);

/// Copy of the scenario with the two-parameter gamma replaced.
Scenario with_gamma(const Scenario& scn, double gamma);

}  // namespace carleman

#endif  // CARLEMAN_CONDITIONS_HPP
