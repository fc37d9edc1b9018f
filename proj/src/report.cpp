// SPDX-License-Identifier: Apache-2.0

#include "carleman/report.hpp"

#include <cmath>
#include <cstdio>

namespace carleman {

namespace {

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

}  // namespace

Json to_json(const ConditionReport& r) {
  Json j;
  j["check"] = r.check;
  j["side"] = to_string(r.side);
  j["verdict"] = to_string(r.verdict);
  j["margin"] = r.margin;
  j["quantity"] = r.quantity;
  j["tolerance"] = r.tolerance;
  j["fail_threshold"] = r.fail_threshold;
  j["samples_evaluated"] = r.samples_evaluated;
  j["finite_difference"] = r.finite_difference;
  Json w;
  w["x"] = vec(r.witness.x);
  w["xi"] = vec(r.witness.xi);
  w["tau"] = r.witness.tau ? Json(*r.witness.tau) : Json(nullptr);
  j["witness"] = w;
  Json d = Json::object();
  for (const auto& [k, v] : r.details) d[k] = v;
  j["details"] = d;
  return j;
}

Json to_json(const TransmissionVerdict& v) {
  Json j;
  j["verdict"] = to_string(v.verdict);
  j["sigma_ratio"] = v.sigma_ratio;
  j["necessary_count_ok"] = v.necessary_count_ok;
  j["m_minus_left"] = v.m_minus[0];
  j["m_minus_right"] = v.m_minus[1];
  j["columns"] = v.columns;
  j["eps_im"] = Json::array({v.eps_im[0], v.eps_im[1]});
  j["samples_evaluated"] = v.samples_evaluated;
  Json q;
  q["x"] = vec(v.worst_x);
  q["xi"] = vec(v.worst_xi);
  q["tau"] = v.worst_tau;
  j["worst_quadruple"] = q;
  if (v.determinant) {
    j["determinant"] = complex_json(*v.determinant);
    j["abs_determinant"] = std::abs(*v.determinant);
  }
  return j;
}

Json to_json(const TransmissionMatrix& t) {
  Json j;
  j["rows"] = t.rows();
  j["cols"] = t.cols();
  j["m"] = t.m;
  j["m_minus_left"] = t.m_minus[0];
  j["m_minus_right"] = t.m_minus[1];
  Json e = Json::array();
  for (int r = 0; r < t.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < t.cols(); ++c) row.push_back(complex_json(t.entries(r, c)));
    e.push_back(row);
  }
  j["entries"] = e;
  j["singular_values"] = vec(t.singular_values);
  j["sigma_ratio"] = t.sigma_ratio();
  if (auto d = t.determinant()) {
    j["determinant"] = complex_json(*d);
    j["abs_determinant"] = std::abs(*d);
  }
  for (int k = 0; k < 2; ++k) {
    Json roots = Json::array();
    for (const auto& r : t.splits[k].roots.entries)
      roots.push_back(Json{{"root", complex_json(r.root)},
                           {"multiplicity", r.multiplicity},
                           {"class", to_string(r.root_class)}});
    j[k == 0 ? "roots_left" : "roots_right"] = roots;
  }
  return j;
}

Json to_json(const ConditionTolerances& t) {
  Json j;
  j["ellipticity"] = t.ellipticity;
  j["ellipticity_fail"] = t.ellipticity_fail;
  j["subellipticity"] = t.subellipticity;
  j["subellipticity_fail"] = t.subellipticity_fail;
  j["pseudoconvexity"] = t.pseudoconvexity;
  j["pseudoconvexity_fail"] = t.pseudoconvexity_fail;
  j["simple_characteristic"] = t.simple_characteristic;
  j["simple_characteristic_fail"] = t.simple_characteristic_fail;
  j["penalty_grid"] = t.penalty_grid;
  return j;
}

Json to_json(const TransmissionOptions& t) {
  Json j;
  j["tol_rank"] = t.tol_rank;
  j["indeterminate_floor"] = t.tol_rank / 100.0;
  j["eps_im"] = t.eps_im ? Json(*t.eps_im) : Json("1e-7*max(1,max|root|)");
  j["delta"] = t.delta ? Json(*t.delta) : Json("1e-5*max(1,max|root|)");
  return j;
}

Json to_json(const EstimatePoint& p) {
  Json j;
  j["tau"] = p.tau;
  j["gamma"] = p.gamma;
  j["C"] = p.c;
  j["eps"] = p.eps;
  j["N"] = p.grid_n;
  j["per_sample"] = p.per_sample;
  return j;
}

Json report_header(const Scenario& scn) {
  Json j;
  j["tool"] = "carleman";
  j["version"] = kToolVersion;
  j["scenario"] = scn.name;
  Json p = Json::object();
  for (const auto& [k, v] : scn.params) p[k] = v;
  j["params"] = p;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_scan_csv(std::ostream& os, const ScanResult& scan) {
  for (const auto& a : scan.axes) os << a.name << ",";
  os << "verdict,sigma_ratio,worst_xi',worst_tau\n";
  for (const auto& c : scan.cells) {
    for (const auto& a : scan.axes) os << format_number(c.params.at(a.name)) << ",";
    os << to_string(c.result.verdict) << "," << format_number(c.result.sigma_ratio) << ",";
    for (Eigen::Index i = 0; i < c.result.worst_xi.size(); ++i)
      os << (i ? " " : "") << format_number(c.result.worst_xi(i));
    os << "," << format_number(c.result.worst_tau) << "\n";
  }
}

void write_estimate_csv(std::ostream& os, const EstimateCurve& curve) {
  os << "tau,gamma,C,eps,N\n";
  for (const auto& p : curve.points)
    os << format_number(p.tau) << "," << format_number(p.gamma) << "," << format_number(p.c) << ","
       << format_number(p.eps) << "," << p.grid_n << "\n";
}

}  // namespace carleman
