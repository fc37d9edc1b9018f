// SPDX-License-Identifier: Apache-2.0

#include "carleman/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carleman/parallel.hpp"

namespace carleman {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

Verdict worst(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    return v == Verdict::fails ? 0 : (v == Verdict::indeterminate ? 1 : 2);
  };
  return rank(a) <= rank(b) ? a : b;
}

Verdict verdict_from_margin(double margin, double fail_threshold) {
  if (margin < -fail_threshold) return Verdict::fails;
  if (margin > fail_threshold) return Verdict::holds;
  return Verdict::indeterminate;
}

Scenario with_gamma(const Scenario& scn, double gamma) {
  Scenario out = scn;
  out.weight = scn.weight.with_gamma(gamma);
  out.params["gamma"] = gamma;
  return out;
}

namespace {

void check_side_points(const SampleRegion& region, Side side, bool interior_problem) {
  if (region.points.empty()) throw Error("empty region: no base points");
  for (const auto& x : region.points) {
    const double xn = x(x.size() - 1);
    const bool ok = (side == Side::left && !interior_problem) ? xn <= 1e-12 : xn >= -1e-12;
    if (!ok) {
      std::ostringstream os;
      os << "base point (" << x.transpose() << ") is not on the " << to_string(side) << " side";
      throw Error(os.str());
    }
  }
}

std::string format_point(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

/// Penalized objective base + sum_i w_i pen_i, maximized over a weight grid
/// of the sampled infimum.
struct Components {
  double base = 0.0;
  double pen[2] = {0.0, 0.0};
};

struct PenaltyResult {
  double quantity = 0.0;
  std::vector<double> weights;
  SamplePoint where;
  std::size_t evaluations = 0;
};

PenaltyResult maximize_penalized_infimum(std::size_t n_base, const SphereSpec& spec,
                                         const std::function<Components(const SamplePoint&)>& comp,
                                         const std::vector<std::vector<double>>& grid,
                                         const RefineOptions& refine) {
  const std::vector<Eigen::VectorXd> sphere = sphere_points(spec);
  std::vector<SamplePoint> pts;
  pts.reserve(n_base * sphere.size());
  for (std::size_t b = 0; b < n_base; ++b)
    for (const auto& u : sphere) pts.push_back({b, u});
  std::vector<Components> c(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { c[i] = comp(pts[i]); });

  PenaltyResult best;
  best.evaluations = pts.size();
  bool first = true;
  for (const auto& w : grid) {
    auto value = [&w](const Components& k) {
      double v = k.base;
      for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * k.pen[i];
      return v;
    };
    std::vector<double> values(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) values[i] = value(c[i]);
    const MinimumResult r = refine_minimum(
        pts, values, spec, [&](const SamplePoint& p) { return value(comp(p)); }, refine);
    best.evaluations += r.evaluations;
    if (first || r.value > best.quantity) {
      best.quantity = r.value;
      best.weights = w;
      best.where = r.where;
      first = false;
    }
  }
  return best;
}

}  // namespace

ConditionReport check_ellipticity(const OperatorSpec& op, const SampleRegion& region,
                                  const ConditionTolerances& tol) {
  if (region.points.empty()) throw Error("empty region: no base points");
  const int n = op.principal.dim();
  std::vector<FrozenSymbol> frozen;
  for (const auto& x : region.points) frozen.push_back(op.principal.freeze(x));

  SphereSpec spec{n, false, region.n_sphere, region.seed};
  auto f = [&](const SamplePoint& s) {
    return std::abs(frozen[s.base].eval(s.u.cast<Complex>()));
  };
  const MinimumResult r = minimize_on_sphere(region.points.size(), spec, f, region.refine);

  ConditionReport rep;
  rep.check = "ellipticity";
  rep.quantity = r.value;
  rep.tolerance = tol.ellipticity;
  rep.fail_threshold = tol.ellipticity_fail;
  rep.margin = r.value - tol.ellipticity;
  rep.verdict = verdict_from_margin(rep.margin, rep.fail_threshold);
  rep.witness = {region.points[r.where.base], r.where.u, std::nullopt};
  rep.samples_evaluated = r.evaluations;
  rep.finite_difference = op.principal.uses_finite_differences();
  return rep;
}

ConditionReport check_subellipticity(const Scenario& scn, Side side, const SampleRegion& region,
                                     const ConditionTolerances& tol) {
  check_side_points(region, side, scn.eigenvalue_shift);
  const int n = scn.dim;
  const OperatorSpec& op = scn.op(side);
  const int shift = scn.eigenvalue_shift ? op.order() : 0;

  std::vector<FrozenSymbol> frozen;
  std::vector<WeightJet> weights;
  for (const auto& x : region.points) {
    frozen.push_back(op.principal.freeze(x));
    weights.push_back(scn.weight.local_phi(side, x));
    if (weights.back().grad.norm() < 1e-12)
      throw Error("sub-ellipticity precondition: weight gradient vanishes at x = " +
                  format_point(x));
  }

  const bool tau0 = region.tau_zero_only;
  SphereSpec spec{tau0 ? n : n + 1, !tau0, region.n_sphere, region.seed};
  auto split_sample = [&](const SamplePoint& s, Eigen::VectorXd& xi, double& tau) {
    if (tau0) {
      xi = s.u;
      tau = 0.0;
    } else {
      xi = s.u.head(n);
      tau = s.u(n);
    }
  };
  auto comp = [&](const SamplePoint& s) {
    Eigen::VectorXd xi;
    double tau;
    split_sample(s, xi, tau);
    const BracketValue b = subellipticity_bracket(frozen[s.base], weights[s.base], xi, tau, shift);
    Components c;
    c.base = b.value;
    c.pen[0] = std::norm(b.p_phi);
    return c;
  };
  std::vector<std::vector<double>> grid;
  for (double m : tol.penalty_grid) grid.push_back({m});
  const PenaltyResult r =
      maximize_penalized_infimum(region.points.size(), spec, comp, grid, region.refine);

  ConditionReport rep;
  rep.check = "sub-ellipticity";
  rep.side = side;
  rep.quantity = r.quantity;
  rep.tolerance = tol.subellipticity;
  rep.fail_threshold = tol.subellipticity_fail;
  rep.margin = r.quantity - tol.subellipticity;
  rep.verdict = verdict_from_margin(rep.margin, rep.fail_threshold);
  Eigen::VectorXd xi;
  double tau;
  split_sample(r.where, xi, tau);
  rep.witness = {region.points[r.where.base], xi, tau};
  rep.samples_evaluated = r.evaluations;
  rep.details["M"] = r.weights.at(0);
  const BracketValue at = subellipticity_bracket(frozen[r.where.base], weights[r.where.base], xi,
                                                 tau, shift);
  rep.details["bracket_at_witness"] = at.value;
  rep.details["abs_p_phi_at_witness"] = std::abs(at.p_phi);
  rep.finite_difference =
      op.principal.uses_finite_differences() || scn.weight.uses_finite_differences();
  return rep;
}

ConditionReport check_strong_pseudoconvexity(const Scenario& scn, Side side,
                                             const SampleRegion& region,
                                             const ConditionTolerances& tol) {
  check_side_points(region, side, scn.eigenvalue_shift);
  const int n = scn.dim;
  const OperatorSpec& op = scn.op(side);
  std::vector<FrozenSymbol> frozen;
  std::vector<WeightJet> psi;
  for (const auto& x : region.points) {
    frozen.push_back(op.principal.freeze(x));
    psi.push_back(scn.weight.psi(side, x));
    if (psi.back().grad.norm() < 1e-12)
      throw Error("pseudo-convexity precondition: psi' vanishes at x = " + format_point(x));
  }

  SphereSpec spec{n + 1, true, region.n_sphere, region.seed};
  auto comp = [&](const SamplePoint& s) {
    const Eigen::VectorXd xi = s.u.head(n);
    const double t = s.u(n);
    const BracketValue b = subellipticity_bracket(frozen[s.base], psi[s.base], xi, t, 0);
    const Eigen::VectorXcd zeta =
        xi.cast<Complex>() + Complex(0.0, t) * psi[s.base].grad.cast<Complex>();
    const Complex pb = (frozen[s.base].dzeta(zeta).array() *
                        psi[s.base].grad.cast<Complex>().array())
                           .sum();
    Components c;
    c.base = b.value;
    c.pen[0] = std::norm(b.p_phi);
    c.pen[1] = std::norm(pb);
    return c;
  };
  std::vector<std::vector<double>> grid;
  for (double m1 : tol.penalty_grid)
    for (double m2 : tol.penalty_grid) grid.push_back({m1, m2});
  const PenaltyResult r =
      maximize_penalized_infimum(region.points.size(), spec, comp, grid, region.refine);

  ConditionReport rep;
  rep.check = "strong-pseudo-convexity";
  rep.side = side;
  rep.quantity = r.quantity;
  rep.tolerance = tol.pseudoconvexity;
  rep.fail_threshold = tol.pseudoconvexity_fail;
  rep.margin = r.quantity - tol.pseudoconvexity;
  rep.verdict = verdict_from_margin(rep.margin, rep.fail_threshold);
  rep.witness = {region.points[r.where.base], r.where.u.head(n), r.where.u(n)};
  rep.samples_evaluated = r.evaluations;
  rep.details["M1"] = r.weights.at(0);
  rep.details["M2"] = r.weights.at(1);
  rep.finite_difference =
      op.principal.uses_finite_differences() || scn.weight.uses_finite_differences();
  return rep;
}

double simple_characteristic_quantity(const FrozenSymbol& p, const Eigen::VectorXd& psi_grad,
                                      const Eigen::VectorXd& xi) {
  const ComplexPolynomial rho =
      p.along(xi.cast<Complex>(), Complex(0.0, 1.0) * psi_grad.cast<Complex>());
  if (rho.degree() < 2) return std::numeric_limits<double>::infinity();
  const std::vector<Complex> rs = roots(rho);
  auto dist_to_positive_axis = [](Complex z) {
    return z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z);
  };
  double q = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rs.size(); ++j)
    for (std::size_t k = j + 1; k < rs.size(); ++k)
      q = std::min(q, std::max(std::abs(rs[j] - rs[k]),
                               dist_to_positive_axis(0.5 * (rs[j] + rs[k]))));
  return q;
}

ConditionReport check_simple_characteristic(const Scenario& scn, Side side,
                                            const SampleRegion& region,
                                            const ConditionTolerances& tol) {
  check_side_points(region, side, scn.eigenvalue_shift);
  const int n = scn.dim;
  const OperatorSpec& op = scn.op(side);
  std::vector<FrozenSymbol> frozen;
  std::vector<Eigen::VectorXd> grads;
  for (const auto& x : region.points) {
    frozen.push_back(op.principal.freeze(x));
    grads.push_back(scn.weight.psi(side, x).grad);
    if (grads.back().norm() < 1e-12)
      throw Error("simple-characteristic precondition: psi' vanishes at x = " + format_point(x));
  }
  SphereSpec spec{n, false, region.n_sphere, region.seed};
  auto f = [&](const SamplePoint& s) {
    return grads[s.base].norm() * simple_characteristic_quantity(frozen[s.base], grads[s.base], s.u);
  };
  const MinimumResult r = minimize_on_sphere(region.points.size(), spec, f, region.refine);

  ConditionReport rep;
  rep.check = "simple-characteristic";
  rep.side = side;
  rep.quantity = r.value;
  rep.tolerance = tol.simple_characteristic;
  rep.fail_threshold = tol.simple_characteristic_fail;
  rep.margin = r.value - tol.simple_characteristic;
  rep.verdict = verdict_from_margin(rep.margin, rep.fail_threshold);
  rep.witness = {region.points[r.where.base], r.where.u, std::nullopt};
  rep.samples_evaluated = r.evaluations;
  rep.finite_difference =
      op.principal.uses_finite_differences() || scn.weight.uses_finite_differences();
  return rep;
}

GammaSearch find_gamma_star(const Scenario& scn, Side side, const SampleRegion& region,
                            const ConditionTolerances& tol, int max_power) {
  if (scn.weight.kind() != WeightSpec::Kind::two_parameter)
    throw Error("gamma search needs a two-parameter weight");
  GammaSearch out;
  for (int k = 0; k <= max_power; ++k) {
    const double gamma = std::ldexp(1.0, k);
    ConditionReport rep = check_subellipticity(with_gamma(scn, gamma), side, region, tol);
    const bool ok = rep.verdict == Verdict::holds;
    out.trail.emplace_back(gamma, std::move(rep));
    if (ok) {
      out.gamma_star = gamma;
      out.verdict = Verdict::holds;
      return out;
    }
  }
  out.verdict = Verdict::indeterminate;
  return out;
}

}  // namespace carleman
