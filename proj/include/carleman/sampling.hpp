// SPDX-License-Identifier: Apache-2.0
//
// Deterministic covector sampling on spheres and hemispheres, and local
// refinement of the worst samples of an objective.

#ifndef CARLEMAN_SAMPLING_HPP
#define CARLEMAN_SAMPLING_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace carleman {

/// Unit sphere in R^dim; with `hemisphere` the last coordinate is >= 0.
struct SphereSpec {
  int dim = 2;
  bool hemisphere = true;
  int count = 1024;
  std::uint64_t seed = 0;
};

/// Poles (the last axis, and +-e_j on the equator) followed by `count`
/// points of a shifted Kronecker sequence. A larger count with the same
/// seed extends the point list without changing its prefix.
std::vector<Eigen::VectorXd> sphere_points(const SphereSpec& spec);

/// Number of explicit poles placed before the low-discrepancy points.
int pole_count(const SphereSpec& spec);

/// Projects onto the sphere (and the hemisphere, by reflecting the last
/// coordinate).
Eigen::VectorXd project_to_sphere(const Eigen::VectorXd& v, bool hemisphere);

struct RefineOptions {
  int rounds = 2;
  int keep = 16;
  bool polish = true;
  double min_step = 1e-10;
};

/// A sample: base-point index plus a point on the sphere.
struct SamplePoint {
  std::size_t base = 0;
  Eigen::VectorXd u;
};

struct MinimumResult {
  double value = 0.0;
  SamplePoint where;
  std::size_t evaluations = 0;
};

using SampleObjective = std::function<double(const SamplePoint&)>;

/// Minimum of `f` over `pts` (values already known), improved by local
/// search around the `keep` worst samples: `rounds` rounds of compass
/// steps with halving radius, then a pattern-search polish of the best
/// point down to `min_step`. Ties go to the lowest index.
MinimumResult refine_minimum(const std::vector<SamplePoint>& pts, const std::vector<double>& values,
                             const SphereSpec& spec, const SampleObjective& f,
                             const RefineOptions& options);

/// Evaluates `f` on every base point x sphere point in parallel, then
/// refines. Results do not depend on the thread count.
MinimumResult minimize_on_sphere(std::size_t n_base, const SphereSpec& spec,
                                 const SampleObjective& f, const RefineOptions& options,
                                 std::vector<SamplePoint>* all_points = nullptr,
                                 std::vector<double>* all_values = nullptr);

}  // namespace carleman

#endif  // CARLEMAN_SAMPLING_HPP
