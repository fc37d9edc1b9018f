// SPDX-License-Identifier: Apache-2.0

#include "carleman/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "carleman/error.hpp"
#include "carleman/parallel.hpp"

namespace carleman {

double TransmissionMatrix::sigma_ratio() const {
  if (cols() < 2 * m || singular_values.size() < 2 * m) return 0.0;
  const double s1 = singular_values(0);
  if (!(s1 > 0.0)) return 0.0;
  return singular_values(2 * m - 1) / s1;
}

std::optional<Complex> TransmissionMatrix::determinant() const {
  if (entries.rows() != entries.cols() || entries.rows() == 0) return std::nullopt;
  return entries.partialPivLu().determinant();
}

namespace {

void place(Eigen::MatrixXcd& T, Eigen::Index row0, Eigen::Index col, int rows,
           const ComplexPolynomial& p, int shift, const char* what) {
  if (p.is_zero()) return;
  if (p.degree() + shift >= rows) {
    std::ostringstream os;
    os << what << " has degree " << p.degree() + shift << " in xi_n, at least the side order "
       << rows;
    throw Error(os.str());
  }
  for (int i = 0; i <= p.degree(); ++i) T(row0 + i + shift, col) = p[i];
}

TransmissionMatrix assemble(const Scenario& scn, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& xi, double tau,
                            const TransmissionOptions& opt) {
  TransmissionMatrix tm;
  tm.m = scn.m();
  const int m = tm.m;
  if (static_cast<int>(scn.transmission.size()) != m)
    throw Error("scenario must have m transmission pairs");

  SplitOptions so;
  so.eps_im = opt.eps_im;
  so.delta = opt.delta;
  for (Side s : {Side::left, Side::right}) {
    const int k = side_index(s);
    tm.order[k] = scn.op(s).order();
    const ComplexPolynomial p = conjugated_normal_polynomial(scn, s, x, xi, tau);
    if (p.is_zero()) throw Error(std::string("conjugated symbol vanishes identically on the ") +
                                 to_string(s) + " side");
    tm.splits[k] = split(p, so);
    tm.kappa[k] = kappa(tm.splits[k]);
    tm.m_minus[k] = tm.splits[k].negative_degree();
  }

  const int rows = tm.order[0] + tm.order[1];
  const int cols = m + tm.m_minus[0] + tm.m_minus[1];
  tm.entries = Eigen::MatrixXcd::Zero(rows, cols);
  const Eigen::Index row0[2] = {0, tm.order[0]};

  for (int j = 0; j < m; ++j) {
    for (Side s : {Side::left, Side::right}) {
      const int k = side_index(s);
      place(tm.entries, row0[k], j, tm.order[k],
            conjugated_transmission_polynomial(scn, s, j, x, xi, tau), 0,
            "conjugated transmission symbol");
    }
  }
  int col = m;
  for (int k = 0; k < 2; ++k) {
    for (int q = 0; q < tm.m_minus[k]; ++q, ++col)
      place(tm.entries, row0[k], col, tm.order[k], tm.kappa[k], q, "shifted kappa column");
  }

  Eigen::MatrixXcd normalized = tm.entries;
  for (Eigen::Index c = 0; c < normalized.cols(); ++c) {
    const double n = normalized.col(c).norm();
    if (n == 0.0) {
      std::ostringstream os;
      os << "column " << c + 1 << " of T vanishes (degenerate transmission operator)";
      throw Error(os.str());
    }
    normalized.col(c) /= n;
  }
  if (cols > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(normalized);
    tm.singular_values = svd.singularValues();
  }
  return tm;
}

bool holds_rank(const TransmissionVerdict& v) { return v.verdict == Verdict::holds; }

// Sort key: lower is worse.
bool worse(const TransmissionVerdict& a, const TransmissionVerdict& b) {
  auto rank = [](Verdict v) { return v == Verdict::fails ? 0 : v == Verdict::indeterminate ? 1 : 2; };
  if (rank(a.verdict) != rank(b.verdict)) return rank(a.verdict) < rank(b.verdict);
  return a.sigma_ratio < b.sigma_ratio;
}

}  // namespace

TransmissionMatrix assemble_T(const Scenario& scn, const InterfaceQuadruple& q,
                              const TransmissionOptions& options) {
  return assemble(scn, q.x(), q.xi(), q.tau(), options);
}

TransmissionMatrix assemble_T_at(const Scenario& scn, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& xi_tangential, double tau,
                                 const TransmissionOptions& options) {
  return assemble(scn, x, xi_tangential, tau, options);
}

TransmissionVerdict check_transmission_at(const Scenario& scn, const InterfaceQuadruple& q,
                                          const TransmissionOptions& options) {
  const TransmissionMatrix tm = assemble_T(scn, q, options);
  TransmissionVerdict v;
  v.m_minus = tm.m_minus;
  v.columns = tm.cols();
  v.necessary_count_ok = tm.m_minus[0] + tm.m_minus[1] >= tm.m;
  v.sigma_ratio = tm.sigma_ratio();
  v.worst_x = q.x();
  v.worst_xi = q.xi();
  v.worst_tau = q.tau();
  v.eps_im = {tm.splits[0].roots.eps_im, tm.splits[1].roots.eps_im};
  v.determinant = tm.determinant();
  if (tm.cols() < 2 * tm.m) {
    v.verdict = Verdict::fails;
    v.sigma_ratio = 0.0;
  } else if (v.sigma_ratio > options.tol_rank) {
    v.verdict = Verdict::holds;
  } else if (v.sigma_ratio >= options.tol_rank / 100.0) {
    v.verdict = Verdict::indeterminate;
  } else {
    v.verdict = Verdict::fails;
  }
  if (holds_rank(v) && !v.necessary_count_ok)
    throw std::logic_error("transmission verdict holds with m_left^- + m_right^- < m");
  return v;
}

TransmissionVerdict check_transmission_point(const Scenario& scn, const Eigen::VectorXd& x0,
                                             const TransmissionSampler& sampler,
                                             const TransmissionOptions& options) {
  const int n = scn.dim;
  SphereSpec spec{n, true, sampler.count, sampler.seed};
  auto eval = [&](const Eigen::VectorXd& u) {
    const InterfaceQuadruple q(x0, u.head(n - 1), std::max(0.0, u(n - 1)));
    return check_transmission_at(scn, q, options);
  };
  const std::vector<Eigen::VectorXd> sphere = sphere_points(spec);
  std::vector<TransmissionVerdict> results(sphere.size());
  parallel_for(sphere.size(), [&](std::size_t i) { results[i] = eval(sphere[i]); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (worse(results[i], results[best])) best = i;
  TransmissionVerdict out = results[best];
  std::size_t evaluations = results.size();

  // Refine on the rank ratio only where the coarse worst still holds.
  if (out.verdict != Verdict::fails && sampler.refine.rounds > 0) {
    std::vector<SamplePoint> pts(sphere.size());
    std::vector<double> values(sphere.size());
    for (std::size_t i = 0; i < sphere.size(); ++i) {
      pts[i] = {0, sphere[i]};
      values[i] = results[i].sigma_ratio;
    }
    const SampleObjective f = [&](const SamplePoint& p) { return eval(p.u).sigma_ratio; };
    const MinimumResult r = refine_minimum(pts, values, spec, f, sampler.refine);
    evaluations += r.evaluations;
    const TransmissionVerdict refined = eval(r.where.u);
    if (worse(refined, out)) out = refined;
  }
  out.samples_evaluated = evaluations;
  return out;
}

ParamAxis parse_param_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error("parameter axis must look like name=a:b:n or name=v: '" + text + "'");
  ParamAxis axis;
  axis.name = text.substr(0, eq);
  std::vector<std::string> parts;
  std::stringstream ss(text.substr(eq + 1));
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw Error("bad number '" + s + "' in '" + text + "'");
    return v;
  };
  if (parts.size() == 1) {
    axis.values = {number(parts[0])};
  } else if (parts.size() == 3) {
    const double a = number(parts[0]), b = number(parts[1]);
    const double nd = number(parts[2]);
    if (nd < 1 || nd != std::floor(nd)) throw Error("grid count must be a positive integer: " + text);
    const int count = static_cast<int>(nd);
    for (int i = 0; i < count; ++i)
      axis.values.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
  } else {
    throw Error("parameter axis must look like name=a:b:n or name=v: '" + text + "'");
  }
  return axis;
}

ScanResult scan_weight_family(const ScenarioFactory& factory, const std::vector<ParamAxis>& axes,
                              const TransmissionSampler& sampler,
                              const TransmissionOptions& options) {
  ScanResult out;
  out.axes = axes;
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw Error("empty parameter axis '" + a.name + "'");
    total *= a.values.size();
  }
  std::vector<std::size_t> stride(axes.size(), 1);
  for (std::size_t k = axes.size(); k-- > 1;) stride[k - 1] = stride[k] * axes[k].values.size();

  auto index_of = [&](std::size_t cell, std::size_t k) {
    return (cell / stride[k]) % axes[k].values.size();
  };
  for (std::size_t c = 0; c < total; ++c) {
    ScanCell cell;
    for (std::size_t k = 0; k < axes.size(); ++k)
      cell.params[axes[k].name] = axes[k].values[index_of(c, k)];
    const Scenario scn = factory(cell.params);
    cell.result = check_transmission_point(scn, scn.x0, sampler, options);
    out.cells.push_back(std::move(cell));
  }

  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (axes[k].values.size() < 2) continue;
    for (std::size_t c = 0; c < total; ++c) {
      if (index_of(c, k) + 1 >= axes[k].values.size()) continue;
      const bool a = out.cells[c].result.verdict == Verdict::holds;
      const bool b = out.cells[c + stride[k]].result.verdict == Verdict::holds;
      if (a == b) continue;
      ScanBoundary bd;
      bd.axis = axes[k].name;
      bd.fixed = out.cells[c].params;
      bd.fixed.erase(axes[k].name);
      bd.last_holds = a ? axes[k].values[index_of(c, k)] : axes[k].values[index_of(c, k) + 1];
      bd.first_other = a ? axes[k].values[index_of(c, k) + 1] : axes[k].values[index_of(c, k)];
      out.boundaries.push_back(std::move(bd));
    }
  }
  return out;
}

}  // namespace carleman
