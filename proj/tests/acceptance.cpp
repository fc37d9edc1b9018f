// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "carleman/conditions.hpp"
#include "carleman/estimator.hpp"
#include "carleman/polynomial.hpp"
#include "carleman/scenario_io.hpp"
#include "carleman/transmission.hpp"
#include "support.hpp"

using namespace carleman;

namespace {

// Tolerances and limits.
constexpr double kDetTarget = 1.0;
constexpr double kDetRelTol = 1e-8;
constexpr double kLimit1 = 1.0;
constexpr double kLimit2 = 30.0;
constexpr double kLimit3 = 60.0;
constexpr double kLimit4 = 30.0;
constexpr double kLimit8 = 10.0;
constexpr double kLimit9 = 10.0;
constexpr double kLimit10 = 300.0;
constexpr double kLimit11 = 300.0;
constexpr double kWitnessXiTol = 0.05;
constexpr int kCountTrials = 10000;
constexpr int kQuadruplesPerScenario = 20;
constexpr int kFactorTrials = 500;
constexpr int kMaxDegree = 8;
constexpr double kRootGap = 0.1;
constexpr double kReconstructTol = 1e-8;
constexpr int kHomogeneityTrials = 1000;
constexpr double kBoundedRatio = 1.2;
constexpr double kBlowupRatio = 10.0;
constexpr double kGridRelTol = 0.05;
constexpr double kGridTau = 20.0;
constexpr double kTrendSlack = 1.10;
constexpr double kTauGamma = 128.0;
constexpr double kBracketTol = 1e-12;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::function<Outcome()>& body, double limit = 0.0) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit > 0.0 && secs >= limit) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  char tail[96];
  if (limit > 0.0)
    std::snprintf(tail, sizeof tail, " [%.2f s, limit %.0f s]", secs, limit);
  else
    std::snprintf(tail, sizeof tail, " [%.2f s]", secs);
  std::printf("%s criterion %d: %s%s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), tail);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

Eigen::VectorXd v1(double a) { return (Eigen::VectorXd(1) << a).finished(); }

SampleRegion region_of(const ScenarioTemplate& t, Side s) {
  SampleRegion r;
  r.points = s == Side::left ? t.region().left_points : t.region().right_points;
  r.n_sphere = t.region().samples;
  r.seed = t.region().seed;
  return r;
}

Outcome determinant() {
  const Scenario s = resolve_scenario("mixed-order24").instantiate();
  const TransmissionMatrix tm = assemble_T_at(s, s.x0, v1(1.0), 0.5);
  if (tm.rows() != 6 || tm.cols() != 6)
    return {false, "matrix is " + std::to_string(tm.rows()) + "x" + std::to_string(tm.cols())};
  const double d = std::abs(*tm.determinant());
  const double rel = std::abs(d - kDetTarget) / kDetTarget;
  return {rel <= kDetRelTol, "6x6, |det T| = " + fmt("%.10g", d) + ", target 1, rel err " +
                                 fmt("%.3g", rel) + " (tol 1e-8)"};
}

Outcome mixed_threshold() {
  const ScenarioTemplate t = resolve_scenario("mixed-order24");
  const ScenarioFactory f = [&](const ParamMap& p) { return t.instantiate(p); };
  const ScanResult r = scan_weight_family(
      f, {parse_param_axis("dphi1=0.5:2.5:41"), parse_param_axis("dphi2=1")}, {});
  const double cell = 0.05, target = std::sqrt(2.0);
  int found = 0;
  bool near = true;
  std::string where;
  for (const auto& b : r.boundaries) {
    if (b.axis != "dphi1") continue;
    ++found;
    const double mid = 0.5 * (b.last_holds + b.first_other);
    near = near && std::abs(mid - target) <= cell;
    where += " " + fmt("%.3g", b.last_holds) + "|" + fmt("%.3g", b.first_other);
  }
  return {found == 1 && near && r.cells.front().result.verdict == Verdict::holds,
          std::to_string(found) + " boundary(ies) at" + where + ", sqrt 2 = 1.414, cell 0.05"};
}

Outcome slope_law() {
  const ScenarioTemplate t = resolve_scenario("diffusion2d");
  auto at = [&](double g1, double g2) {
    const Scenario s = t.instantiate({{"gamma1", g1}, {"gamma2", g2}});
    return check_transmission_point(s, s.x0);
  };
  const TransmissionVerdict good = at(0.5, 1.0), bad = at(1.0, 0.5);
  const double wxi = bad.worst_xi.norm();
  const bool point_ok = good.verdict == Verdict::holds && bad.verdict == Verdict::fails;
  const bool witness_ok = wxi <= kWitnessXiTol;

  const ScenarioFactory f = [&](const ParamMap& p) { return t.instantiate(p); };
  const ScanResult r = scan_weight_family(
      f, {parse_param_axis("gamma2=0.5:1.5:3"), parse_param_axis("gamma1=0:2:41")}, {});
  const double cell = 0.05;
  bool scan_ok = true;
  int found = 0;
  for (const auto& b : r.boundaries) {
    if (b.axis != "gamma1") continue;
    ++found;
    const double g2 = b.fixed.at("gamma2");
    const double mid = 0.5 * (b.last_holds + b.first_other);
    scan_ok = scan_ok && std::abs(mid - g2) <= cell;
  }
  scan_ok = scan_ok && found == 3;
  std::ostringstream os;
  os << "(0.5,1) " << to_string(good.verdict) << ", (1,0.5) " << to_string(bad.verdict)
     << " with witness |xi'| = " << fmt("%.3g", wxi) << " tau = " << fmt("%.3g", bad.worst_tau)
     << " (tol 0.05); scan boundaries " << found << "/3 within one cell of gamma1 = gamma2"
     << (scan_ok ? "" : " (missed)");
  return {point_ok && witness_ok && scan_ok, os.str()};
}

Outcome decoupled() {
  const ScenarioTemplate t = resolve_scenario("decoupled-dirichlet");
  const std::vector<double> grid{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  int checked = 0, wrong = 0;
  std::string bad;
  for (double g1 : grid) {
    for (double g2 : grid) {
      if (g1 == 0.0 && g2 == 0.0) continue;  // no weight at all
      const bool must_fail = g1 >= 0.0 || g2 <= 0.0;
      const Scenario s = t.instantiate({{"gamma1", g1}, {"gamma2", g2}});
      const Verdict v = check_transmission_point(s, s.x0).verdict;
      ++checked;
      if (must_fail && v != Verdict::fails) {
        ++wrong;
        bad += " (" + fmt("%g", g1) + "," + fmt("%g", g2) + ")";
      }
    }
  }
  const Scenario ok = t.instantiate({{"gamma1", -1.0}, {"gamma2", 1.0}});
  const Verdict v = check_transmission_point(ok, ok.x0).verdict;
  return {wrong == 0 && v == Verdict::holds,
          std::to_string(checked) + " weights, " + std::to_string(wrong) +
              " failing-region weights not failing" + bad + "; (-1,1) " + to_string(v)};
}

Outcome count_theorem() {
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int holds = 0, violations = 0, evaluated = 0;
  for (int sc = 0; evaluated < kCountTrials; ++sc) {
    const int kind = sc % 4;
    const int ml = kind >= 2 ? 4 : 2, mr = kind % 2 == 1 ? 4 : 2;
    const Scenario s = testing::random_scenario(rng, ml, mr);
    for (int k = 0; k < kQuadruplesPerScenario && evaluated < kCountTrials; ++k, ++evaluated) {
      const InterfaceQuadruple q(s.x0, v1(u(rng)), std::abs(u(rng)));
      TransmissionVerdict v;
      try {
        v = check_transmission_at(s, q);
      } catch (const std::logic_error&) {
        ++violations;
        continue;
      }
      if (v.verdict != Verdict::holds) continue;
      ++holds;
      int neg = 0;
      for (Side side : {Side::left, Side::right}) {
        const auto p = conjugated_normal_polynomial(s, side, q);
        const auto rs = testing::companion_roots(p);
        double mx = 1.0;
        for (const auto& z : rs) mx = std::max(mx, std::abs(z));
        for (const auto& z : rs) neg += z.imag() < -1e-7 * mx ? 1 : 0;
      }
      if (neg < s.m()) ++violations;
    }
  }
  return {violations == 0 && holds > 0, std::to_string(evaluated) + " quadruples, " +
                                            std::to_string(holds) + " hold, " +
                                            std::to_string(violations) + " count violations"};
}

Outcome factorization() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  int degree_bad = 0, class_bad = 0;
  for (int t = 0; t < kFactorTrials; ++t) {
    const int d = 1 + t % kMaxDegree;
    const auto rs = testing::separated_roots(rng, d, kRootGap);
    const Complex lead(u(rng) + 2.0, u(rng));
    const ComplexPolynomial p = lead * testing::expand_roots(rs);
    const Split sp = split(p);
    worst = std::max(worst, relative_coefficient_error(sp.reconstruct(), p));
    if (kappa(sp).degree() + sp.negative_degree() != p.degree()) ++degree_bad;
    const int neg = static_cast<int>(
        std::count_if(rs.begin(), rs.end(), [](Complex z) { return z.imag() < 0.0; }));
    if (sp.negative_degree() != neg) ++class_bad;
  }
  // the degree identity with no separation assumption
  for (int t = 0; t < kFactorTrials; ++t) {
    Eigen::VectorXcd c(1 + 1 + t % kMaxDegree);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = Complex(u(rng), u(rng));
    const Split sp = split(ComplexPolynomial(c));
    if (kappa(sp).degree() + sp.negative_degree() != ComplexPolynomial(c).degree()) ++degree_bad;
  }
  return {worst <= kReconstructTol && degree_bad == 0 && class_bad == 0,
          "max reconstruction error " + fmt("%.3g", worst) + " (tol 1e-8), " +
              std::to_string(degree_bad) + " degree mismatches, " + std::to_string(class_bad) +
              " class mismatches"};
}

Outcome homogeneity() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> scales{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  int mismatched = 0;
  for (int t = 0; t < kHomogeneityTrials; ++t) {
    const Scenario s = t % 2 == 0 ? testing::diffusion(2 * u(rng), 2 * u(rng))
                                  : testing::random_scenario(rng, 2, 4);
    const double xi = u(rng), tau = std::abs(u(rng)) + 1e-3;
    const Verdict ref = check_transmission_at(s, InterfaceQuadruple(s.x0, v1(xi), tau)).verdict;
    for (double sc : scales)
      if (check_transmission_at(s, InterfaceQuadruple(s.x0, v1(sc * xi), sc * tau)).verdict != ref) {
        ++mismatched;
        break;
      }
  }
  return {mismatched == 0, std::to_string(kHomogeneityTrials) + " quadruples x 7 scales, " +
                               std::to_string(mismatched) + " verdict changes"};
}

Outcome subellipticity_oracles() {
  const ScenarioTemplate quad_t = resolve_scenario("laplace-quadratic");
  const Scenario quad = quad_t.instantiate();
  double min_margin = 1e300;
  bool quad_ok = true;
  for (Side s : {Side::left, Side::right}) {
    const ConditionReport r = check_subellipticity(quad, s, region_of(quad_t, s));
    quad_ok = quad_ok && r.verdict == Verdict::holds && r.margin > 0.0;
    min_margin = std::min(min_margin, r.margin);
  }

  // Laplacian, linear weight: {Re p_phi, Im p_phi} = 0 identically, so the
  // quantity is 0 at any zero of p_phi.
  const ScenarioTemplate lin_t = resolve_scenario("diffusion2d");
  const Scenario lin = lin_t.instantiate({{"c2", 0.0}});
  const ConditionReport rl = check_subellipticity(lin, Side::right, region_of(lin_t, Side::right));
  const auto br = subellipticity_bracket(lin, Side::right, rl.witness.x, rl.witness.xi,
                                         rl.witness.tau.value_or(0.0));
  const bool lin_ok = rl.verdict == Verdict::fails && std::abs(br.value) <= kBracketTol &&
                      std::abs(rl.quantity) <= 1e-6;

  std::mt19937_64 rng(5);
  int tau0_bad = 0;
  for (int t = 0; t < 40; ++t) {
    Scenario s = lin;
    s.right.principal = testing::random_elliptic2(rng);
    SampleRegion r = region_of(lin_t, Side::right);
    r.tau_zero_only = true;
    r.n_sphere = 512;
    if (check_subellipticity(s, Side::right, r).verdict != Verdict::holds) ++tau0_bad;
  }
  std::ostringstream os;
  os << "quadratic weight " << (quad_ok ? "holds" : "does not hold") << " (min margin "
     << fmt("%.3g", min_margin) << "); linear weight " << to_string(rl.verdict) << " (bracket "
     << fmt("%.2g", br.value) << ", closed form 0); tau = 0 restriction: " << tau0_bad
     << "/40 elliptic samples not holding";
  return {quad_ok && lin_ok && tau0_bad == 0, os.str()};
}

Outcome pseudoconvexity_oracles() {
  const ScenarioTemplate lap_t = resolve_scenario("twoparam-diffusion");
  const Scenario lap = lap_t.instantiate({{"c2", 0.0}});
  bool lap_ok = true;
  for (Side s : {Side::left, Side::right}) {
    lap_ok = lap_ok &&
             check_strong_pseudoconvexity(lap, s, region_of(lap_t, s)).verdict == Verdict::holds &&
             check_simple_characteristic(lap, s, region_of(lap_t, s)).verdict == Verdict::holds;
  }
  const ScenarioTemplate bil_t = resolve_scenario("bilaplace");
  const Scenario bil = bil_t.instantiate();
  const ConditionReport sc = check_simple_characteristic(bil, Side::right, region_of(bil_t, Side::right));
  const bool bil_ok = sc.verdict == Verdict::fails;
  return {lap_ok && bil_ok, std::string("Laplacian + linear psi ") +
                                (lap_ok ? "passes both" : "does not pass both") +
                                "; bi-Laplacian simple-characteristic " + to_string(sc.verdict) +
                                " (quantity " + fmt("%.2g", sc.quantity) + ")"};
}

Outcome estimate_validator() {
  const ScenarioTemplate t = resolve_scenario("diffusion2d");
  EstimatorOptions o;
  o.length = t.estimator().length;
  o.grid_n = 400;
  const std::vector<double> taus = parse_number_list("5:100:20");
  const std::vector<double> xi = default_xi_samples();

  const Scenario good = t.instantiate({{"gamma1", 0.5}, {"gamma2", 1.0}});
  const EstimateCurve cg = sweep(good, taus, {}, xi, o);
  double lo = 1e300, hi = 0.0;
  for (const auto& p : cg.points) {
    lo = std::min(lo, p.c);
    hi = std::max(hi, p.c);
  }
  const double bounded = hi / lo;

  const Scenario bad = t.instantiate({{"gamma1", 1.0}, {"gamma2", 0.5}});
  const EstimateCurve cb = sweep(bad, {5.0, 100.0}, {}, xi, o);
  const double blow = cb.points[1].c / cb.points[0].c;

  double grid = 0.0;
  for (const Scenario* s : {&good, &bad}) {
    EstimatorOptions fine = o;
    fine.grid_n = 800;
    const double c4 = sweep(*s, {kGridTau}, {}, xi, o).points[0].c;
    const double c8 = sweep(*s, {kGridTau}, {}, xi, fine).points[0].c;
    grid = std::max(grid, std::abs(c8 - c4) / c4);
  }
  std::ostringstream os;
  os << "(0.5,1) max C / min C = " << fmt("%.4g", bounded) << " (< 1.2); (1,0.5) C(100)/C(5) = "
     << fmt("%.4g", blow) << " (> 10); grid doubling at tau = 20: " << fmt("%.3g", grid)
     << " (< 0.05)";
  return {bounded < kBoundedRatio && blow > kBlowupRatio && grid < kGridRelTol, os.str()};
}

Outcome two_parameter_trend() {
  const ScenarioTemplate t = resolve_scenario("twoparam-diffusion");
  EstimatorOptions o;
  o.length = t.estimator().length;
  o.grid_n = t.estimator().grid_n;
  o.mode = EstimateMode::simple_characteristic;
  const EstimateCurve c =
      sweep_fixed_product(t.instantiate(), kTauGamma, {4.0, 8.0, 16.0}, default_xi_samples(), o);
  bool ok = true;
  std::ostringstream os;
  os << "gamma C(tau gamma = 128):";
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    os << " " << fmt("%g", c.points[i].gamma) << ":" << fmt("%.4g", c.points[i].c);
    if (i > 0) ok = ok && c.points[i].c <= kTrendSlack * c.points[i - 1].c;
  }
  os << " (non-increasing within 10%)";
  return {ok, os.str()};
}

}  // namespace

int main() {
  report(1, determinant, kLimit1);
  report(2, mixed_threshold, kLimit2);
  report(3, slope_law, kLimit3);
  report(4, decoupled, kLimit4);
  report(5, count_theorem);
  report(6, factorization);
  report(7, homogeneity);
  report(8, subellipticity_oracles, kLimit8);
  report(9, pseudoconvexity_oracles, kLimit9);
  report(10, estimate_validator, kLimit10);
  report(11, two_parameter_trend, kLimit11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
