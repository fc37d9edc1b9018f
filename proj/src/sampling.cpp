// SPDX-License-Identifier: Apache-2.0

#include "carleman/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "carleman/error.hpp"
#include "carleman/parallel.hpp"

namespace carleman {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double frac(double v) { return v - std::floor(v); }

/// Generators of the R_k sequence: 1/g^j with g^{k+1} = g + 1.
std::vector<double> kronecker_alpha(int k) {
  double g = 2.0;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (k + 1));
  std::vector<double> a(k);
  for (int j = 0; j < k; ++j) a[j] = frac(std::pow(1.0 / g, j + 1));
  return a;
}

int uniform_dims(int d) {
  if (d <= 1) return 0;
  if (d == 2) return 1;
  if (d == 3) return 2;
  return d + d % 2;
}

Eigen::VectorXd map_to_sphere(const std::vector<double>& u, int d, bool hemisphere) {
  constexpr double pi = 3.14159265358979323846;
  Eigen::VectorXd p(d);
  if (d == 2) {
    const double theta = (hemisphere ? pi : 2.0 * pi) * u[0];
    p << std::cos(theta), std::sin(theta);
  } else if (d == 3) {
    const double z = hemisphere ? u[0] : 2.0 * u[0] - 1.0;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * pi * u[1];
    p << r * std::cos(phi), r * std::sin(phi), z;
  } else {
    // Box-Muller on consecutive coordinate pairs
    for (int j = 0; j < d; j += 2) {
      const double r = std::sqrt(-2.0 * std::log(std::clamp(u[j], 1e-12, 1.0)));
      const double a = 2.0 * pi * u[j + 1];
      p(j) = r * std::cos(a);
      if (j + 1 < d) p(j + 1) = r * std::sin(a);
    }
    if (p.norm() == 0.0) p(d - 1) = 1.0;
    p.normalize();
    if (hemisphere) p(d - 1) = std::abs(p(d - 1));
  }
  return p;
}

/// Orthonormal basis of the tangent space at unit u (columns).
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& u) {
  const Eigen::Index d = u.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  return q.rightCols(d - 1);
}

double base_radius(const SphereSpec& spec) {
  if (spec.dim <= 1) return 0.0;
  const double n = std::max(1, spec.count);
  return std::min(0.5, 3.14159265358979323846 / std::pow(n, 1.0 / (spec.dim - 1)));
}

struct Probe {
  SamplePoint point;
  double value;
};

// One compass sweep; returns true if the probe moved.
bool compass_step(Probe& p, double radius, const SphereSpec& spec, const SampleObjective& f,
                  std::size_t& evaluations) {
  if (spec.dim <= 1) return false;
  const Eigen::MatrixXd t = tangent_basis(p.point.u);
  Probe best = p;
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    for (double s : {1.0, -1.0}) {
      SamplePoint q{p.point.base, project_to_sphere(p.point.u + s * radius * t.col(j),
                                                    spec.hemisphere)};
      const double v = f(q);
      ++evaluations;
      if (v < best.value) best = {q, v};
    }
  }
  if (best.value < p.value) {
    p = best;
    return true;
  }
  return false;
}

}  // namespace

int pole_count(const SphereSpec& spec) {
  return spec.hemisphere ? 1 + 2 * (spec.dim - 1) : 2 * spec.dim;
}

std::vector<Eigen::VectorXd> sphere_points(const SphereSpec& spec) {
  const int d = spec.dim;
  if (d < 1) throw Error("sphere dimension must be positive");
  if (spec.count < 0) throw Error("sample count must be non-negative");
  std::vector<Eigen::VectorXd> pts;
  if (spec.hemisphere) {
    pts.push_back(Eigen::VectorXd::Unit(d, d - 1));
    for (int j = 0; j + 1 < d; ++j) {
      pts.push_back(Eigen::VectorXd::Unit(d, j));
      pts.push_back(-Eigen::VectorXd::Unit(d, j));
    }
  } else {
    for (int j = 0; j < d; ++j) {
      pts.push_back(Eigen::VectorXd::Unit(d, j));
      pts.push_back(-Eigen::VectorXd::Unit(d, j));
    }
  }
  const int k = uniform_dims(d);
  if (k == 0) return pts;
  const std::vector<double> alpha = kronecker_alpha(k);
  std::uint64_t state = spec.seed;
  std::vector<double> offset(k);
  for (int j = 0; j < k; ++j) offset[j] = double(splitmix64(state) >> 11) * 0x1.0p-53;
  std::vector<double> u(k);
  for (int i = 0; i < spec.count; ++i) {
    for (int j = 0; j < k; ++j) u[j] = frac(offset[j] + double(i + 1) * alpha[j]);
    pts.push_back(map_to_sphere(u, d, spec.hemisphere));
  }
  return pts;
}

Eigen::VectorXd project_to_sphere(const Eigen::VectorXd& v, bool hemisphere) {
  Eigen::VectorXd p = v;
  const double n = p.norm();
  if (n == 0.0) throw Error("cannot project the zero vector onto the sphere");
  p /= n;
  if (hemisphere) p(p.size() - 1) = std::abs(p(p.size() - 1));
  return p;
}

MinimumResult refine_minimum(const std::vector<SamplePoint>& pts, const std::vector<double>& values,
                             const SphereSpec& spec, const SampleObjective& f,
                             const RefineOptions& options) {
  if (pts.empty()) throw Error("empty sample set");
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min<std::size_t>(std::max(0, options.keep), pts.size());
  std::partial_sort(order.begin(), order.begin() + std::max<std::size_t>(keep, 1), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] < values[b];
                      return a < b;
                    });

  MinimumResult out;
  out.value = values[order[0]];
  out.where = pts[order[0]];
  if (keep == 0 || spec.dim <= 1 || options.rounds <= 0) return out;

  std::vector<Probe> probes(keep);
  for (std::size_t i = 0; i < keep; ++i) probes[i] = {pts[order[i]], values[order[i]]};
  std::vector<std::size_t> evals(keep, 0);

  const double r0 = base_radius(spec);
  parallel_for(keep, [&](std::size_t i) {
    double radius = r0;
    for (int r = 0; r < options.rounds; ++r) {
      radius *= 0.5;
      compass_step(probes[i], radius, spec, f, evals[i]);
    }
  });

  std::vector<std::size_t> rank(keep);
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(),
                   [&](std::size_t a, std::size_t b) { return probes[a].value < probes[b].value; });

  if (options.polish) {
    const std::size_t n_polish = std::min<std::size_t>(4, keep);
    const double start = r0 * std::pow(0.5, options.rounds);
    parallel_for(n_polish, [&](std::size_t k) {
      Probe& p = probes[rank[k]];
      double step = start;
      int budget = 4000;
      while (step > options.min_step && budget-- > 0) {
        if (!compass_step(p, step, spec, f, evals[rank[k]])) step *= 0.5;
      }
    });
  }

  for (std::size_t i = 0; i < keep; ++i) {
    out.evaluations += evals[i];
    if (probes[i].value < out.value) {
      out.value = probes[i].value;
      out.where = probes[i].point;
    }
  }
  return out;
}

MinimumResult minimize_on_sphere(std::size_t n_base, const SphereSpec& spec,
                                 const SampleObjective& f, const RefineOptions& options,
                                 std::vector<SamplePoint>* all_points,
                                 std::vector<double>* all_values) {
  if (n_base == 0) throw Error("empty region: no base points");
  const std::vector<Eigen::VectorXd> sphere = sphere_points(spec);
  std::vector<SamplePoint> pts;
  pts.reserve(n_base * sphere.size());
  for (std::size_t b = 0; b < n_base; ++b)
    for (const auto& u : sphere) pts.push_back({b, u});
  std::vector<double> values(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = f(pts[i]); });
  MinimumResult r = refine_minimum(pts, values, spec, f, options);
  r.evaluations += pts.size();
  if (all_points) *all_points = std::move(pts);
  if (all_values) *all_values = std::move(values);
  return r;
}

}  // namespace carleman
