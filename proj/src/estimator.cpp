// SPDX-License-Identifier: Apache-2.0

#include "carleman/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "carleman/conditions.hpp"
#include "carleman/error.hpp"
#include "carleman/parallel.hpp"

namespace carleman {

namespace {

using Triplet = Eigen::Triplet<Complex>;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Smoothstep with k continuous derivatives at both ends.
double smoothstep(double s, int k) {
  s = std::clamp(s, 0.0, 1.0);
  double acc = 0.0;
  for (int j = 0; j <= k; ++j)
    acc += binomial(k + j, j) * binomial(2 * k + 1, k - j) * std::pow(-s, j);
  return std::pow(s, k + 1) * acc;
}

SparseMatrixC diagonal(const Eigen::VectorXcd& d) {
  SparseMatrixC m(d.size(), d.size());
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) != Complex(0.0)) t.emplace_back(i, i, d(i));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrixC identity(Eigen::Index n) { return diagonal(Eigen::VectorXcd::Ones(n)); }

Eigen::VectorXd trapezoid(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n + 1, h);
  w(0) = w(n) = 0.5 * h;
  return w;
}

int max_order(const Scenario& scn) { return std::max(scn.left.order(), scn.right.order()); }

/// (system point, original point, sign of d/dy in original x_n)
struct SidePoint {
  Eigen::VectorXd system;
  Eigen::VectorXd original;
  double sign;
};

SidePoint side_point(const Scenario& scn, Side side, double y) {
  SidePoint p{scn.x0, scn.x0, 1.0};
  p.system(scn.dim - 1) = y;
  p.original(scn.dim - 1) = y;
  if (side == Side::left && !scn.eigenvalue_shift) {
    p.original(scn.dim - 1) = -y;
    p.sign = -1.0;
  }
  return p;
}

bool two_parameter(const EstimatorOptions& o) { return o.mode != EstimateMode::standard; }

/// Coefficients of xi_n^j of a symbol frozen at x with tangential xi'.
ComplexPolynomial normal_coefficients(const Symbol& s, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& xi) {
  const int n = s.dim();
  Eigen::VectorXcd base = Eigen::VectorXcd::Zero(n), dir = Eigen::VectorXcd::Zero(n);
  base.head(n - 1) = xi.cast<Complex>();
  dir(n - 1) = 1.0;
  return s.freeze(x).along(base, dir);
}

/// A^j for A = -i D1 + i tau diag(phi'), j = 0..order.
std::vector<SparseMatrixC> conjugated_powers(const ModelProblem& mp, Side side, double tau,
                                             int order) {
  const SparseMatrixC d1 = derivative_matrix(mp.n(), mp.h());
  const SideWeight w = side_weight(mp, side);
  const SparseMatrixC a =
      Complex(0.0, -1.0) * d1 + diagonal(Complex(0.0, tau) * w.slope.cast<Complex>());
  std::vector<SparseMatrixC> pw{identity(mp.n() + 1)};
  for (int j = 1; j <= order; ++j) pw.push_back((a * pw.back()).pruned());
  return pw;
}

/// Pointwise tau weight: tau, or tau gamma phi(y) in two-parameter modes.
Eigen::VectorXd tau_weight(const ModelProblem& mp, Side side, double tau) {
  if (!two_parameter(mp.options())) return Eigen::VectorXd::Constant(mp.n() + 1, tau);
  return tau * mp.scenario().weight.gamma() * side_weight(mp, side).value;
}

SparseMatrixC embed(const ModelProblem& mp, Side side) {
  const int n = mp.n();
  SparseMatrixC e(2 * (n + 1), n + 1);
  std::vector<Triplet> t;
  for (int i = 0; i <= n; ++i)
    t.emplace_back(side == Side::left ? n - i : n + 1 + i, i, Complex(1.0));
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

SparseMatrixC gram(const SparseMatrixC& m, const Eigen::VectorXd& w) {
  return SparseMatrixC(m.adjoint() * diagonal(w.cast<Complex>()) * m);
}

SparseMatrixC row_gram(const Eigen::RowVectorXcd& r, double w) {
  SparseMatrixC s(1, r.size());
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r(i) != Complex(0.0)) t.emplace_back(0, i, r(i));
  s.setFromTriplets(t.begin(), t.end());
  return SparseMatrixC(w * SparseMatrixC(s.adjoint() * s));
}

double top_dense(const PencilForms& f, double eps) {
  const Eigen::MatrixXcd l = Eigen::MatrixXcd(f.left);
  Eigen::MatrixXcd r = Eigen::MatrixXcd(f.right);
  r.diagonal().array() += eps;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(l, r, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("pencil failure: right form is not positive definite");
  return es.eigenvalues().maxCoeff();
}

}  // namespace

const char* to_string(EstimateMode mode) {
  switch (mode) {
    case EstimateMode::standard: return "standard";
    case EstimateMode::two_parameter: return "two_parameter";
    case EstimateMode::simple_characteristic: return "simple_characteristic";
  }
  return "?";
}

ModelProblem::ModelProblem(const Scenario& scn, Eigen::VectorXd xi_tangential,
                           EstimatorOptions options)
    : scn_(scn), xi_(std::move(xi_tangential)), opt_(options) {
  if (xi_.size() != scn_.dim - 1) throw Error("xi' must have n - 1 entries");
  if (!(opt_.length > 0.0)) throw Error("model length must be positive");
  const int m = max_order(scn_);
  if (opt_.grid_n < 8 * m) {
    std::ostringstream os;
    os << "grid too small for the stencil: N = " << opt_.grid_n << " < " << 8 * m;
    throw Error(os.str());
  }
  if (two_parameter(opt_) && scn_.weight.kind() != WeightSpec::Kind::two_parameter)
    throw Error("two-parameter estimate needs a two-parameter weight");

  const Eigen::VectorXd y = grid();
  const double a = 0.5 * opt_.length, b = 0.875 * opt_.length;
  mask_.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double s = smoothstep((b - y(i)) / (b - a), m);
    mask_(i) = s * s;
  }

  for (Side s : {Side::left, Side::right}) {
    for (double yy : {0.0, 0.5 * opt_.length, opt_.length}) {
      const SidePoint p = side_point(scn_, s, yy);
      const WeightJet w = scn_.weight.phi(s, p.original);
      const double tangential = w.grad.head(scn_.dim - 1).norm();
      if (tangential > 1e-10 * (1.0 + w.grad.norm()))
        throw Error("model problem needs a weight depending on x_n only");
    }
  }
}

Eigen::VectorXd ModelProblem::grid() const {
  return Eigen::VectorXd::LinSpaced(opt_.grid_n + 1, 0.0, opt_.length);
}

SparseMatrixC derivative_matrix(int n, double h) {
  if (n < 4) throw Error("derivative stencil needs at least 5 points");
  std::vector<Triplet> t;
  const double c = 1.0 / (12.0 * h);
  auto row = [&](int i, int start, std::initializer_list<double> w, double sign) {
    int k = 0;
    for (double v : w) {
      t.emplace_back(i, sign > 0.0 ? start + k : start - k, Complex(sign * v * c));
      ++k;
    }
  };
  row(0, 0, {-25, 48, -36, 16, -3}, 1.0);
  row(1, 0, {-3, -10, 18, -6, 1}, 1.0);
  for (int i = 2; i <= n - 2; ++i) {
    t.emplace_back(i, i - 2, Complex(c));
    t.emplace_back(i, i - 1, Complex(-8.0 * c));
    t.emplace_back(i, i + 1, Complex(8.0 * c));
    t.emplace_back(i, i + 2, Complex(-c));
  }
  row(n - 1, n, {-3, -10, 18, -6, 1}, -1.0);
  row(n, n, {-25, 48, -36, 16, -3}, -1.0);
  SparseMatrixC d(n + 1, n + 1);
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

SideWeight side_weight(const ModelProblem& mp, Side side) {
  const Eigen::VectorXd y = mp.grid();
  const Scenario& scn = mp.scenario();
  SideWeight w{Eigen::VectorXd(y.size()), Eigen::VectorXd(y.size())};
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const SidePoint p = side_point(scn, side, y(i));
    const WeightJet j = scn.weight.phi(side, p.original);
    w.value(i) = j.value;
    w.slope(i) = p.sign * j.grad(scn.dim - 1);
  }
  return w;
}

SparseMatrixC build_conjugated_ode(const ModelProblem& mp, Side side, double tau) {
  const Scenario& scn = mp.scenario();
  const int m = scn.op(side).order();
  const std::vector<SparseMatrixC> pw = conjugated_powers(mp, side, tau, m);
  const Eigen::VectorXd y = mp.grid();
  std::vector<Eigen::VectorXcd> coef(m + 1, Eigen::VectorXcd::Zero(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const SidePoint p = side_point(scn, side, y(i));
    const SystemSide s = system_side(scn, side, p.system);
    const ComplexPolynomial poly = normal_coefficients(s.p, p.system, mp.xi());
    for (int j = 0; j <= std::min(m, poly.degree()); ++j) coef[j](i) = poly[j];
    if (s.shift) coef[0](i) -= std::pow(tau, m);
  }
  SparseMatrixC op(y.size(), y.size());
  for (int j = 0; j <= m; ++j) op += diagonal(coef[j]) * pw[j];
  return SparseMatrixC((op * diagonal(mp.mask().cast<Complex>())).pruned());
}

SparseMatrixC interior_norm_form(const ModelProblem& mp, int order, const Eigen::VectorXd& tau,
                                 const Eigen::VectorXd& prefactor) {
  const int n = mp.n();
  const SparseMatrixC d1 = derivative_matrix(n, mp.h());
  const Eigen::VectorXd w = trapezoid(n, mp.h());
  const double xi2 = mp.xi().squaredNorm();
  SparseMatrixC db = diagonal(mp.mask().cast<Complex>());
  SparseMatrixC form(n + 1, n + 1);
  for (int b = 0; b <= order; ++b) {
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(n + 1);
    for (int q = b; q <= order; ++q)
      weight.array() += binomial(q, b) * std::pow(xi2, q - b) *
                        tau.array().pow(2.0 * (order - q));
    form += gram(db, (w.array() * prefactor.array() * weight.array()).matrix());
    db = SparseMatrixC((d1 * db).pruned());
  }
  return form;
}

double interior_norm(const ModelProblem& mp, int order, double tau, const Eigen::VectorXcd& v) {
  const int n = mp.n();
  const Eigen::MatrixXcd d1 = Eigen::MatrixXcd(derivative_matrix(n, mp.h()));
  const Eigen::VectorXd w = trapezoid(n, mp.h());
  const double xi2 = mp.xi().squaredNorm();
  std::vector<double> semi(order + 1);
  Eigen::VectorXcd du = mp.mask().cast<Complex>().cwiseProduct(v);
  std::vector<double> deriv(order + 1);
  for (int b = 0; b <= order; ++b) {
    deriv[b] = (w.array() * du.array().abs2()).sum();
    du = d1 * du;
  }
  double total = 0.0;
  for (int q = 0; q <= order; ++q) {
    double s = 0.0;
    for (int b = 0; b <= q; ++b) s += binomial(q, b) * std::pow(xi2, q - b) * deriv[b];
    total += std::pow(tau, 2.0 * (order - q)) * s;
  }
  return total;
}

PencilForms assemble_forms(const ModelProblem& mp, double tau) {
  const Scenario& scn = mp.scenario();
  const EstimatorOptions& o = mp.options();
  if (tau < o.tau_floor) {
    std::ostringstream os;
    os << "tau = " << tau << " below the floor " << o.tau_floor;
    throw Error(os.str());
  }
  const int n = mp.n();
  const int m = scn.m();
  const double gamma = scn.weight.gamma();
  const double xi2 = mp.xi().squaredNorm();
  const Eigen::VectorXd w = trapezoid(n, mp.h());
  const SparseMatrixC d1 = derivative_matrix(n, mp.h());
  const SparseMatrixC chi = diagonal(mp.mask().cast<Complex>());

  PencilForms f;
  f.dim = 2 * (n + 1);
  f.left = SparseMatrixC(f.dim, f.dim);
  f.right = SparseMatrixC(f.dim, f.dim);

  std::array<Eigen::MatrixXcd, 2> trows;
  std::array<double, 2> lambda_t{};
  for (Side s : {Side::left, Side::right}) {
    const int k = side_index(s);
    const int mk = scn.op(s).order();
    const SparseMatrixC e = embed(mp, s);
    const Eigen::VectorXd tw = tau_weight(mp, s, tau);
    Eigen::VectorXd pref;
    switch (o.mode) {
      case EstimateMode::standard: pref = Eigen::VectorXd::Constant(n + 1, 1.0 / tau); break;
      case EstimateMode::two_parameter: pref = tw.cwiseInverse(); break;
      case EstimateMode::simple_characteristic: pref = gamma * tw.cwiseInverse(); break;
    }
    SparseMatrixC lk = interior_norm_form(mp, mk, tw, pref);

    // Traces |D^j u(0)|^2 weighted by lambda^{2(m_k - 1 - j) + 1}.
    const double lt = std::sqrt(xi2 + tw(0) * tw(0));
    lambda_t[k] = lt;
    SparseMatrixC dj = chi;
    for (int j = 0; j < mk; ++j) {
      const Eigen::RowVectorXcd r = Eigen::RowVectorXcd(Eigen::MatrixXcd(dj).row(0));
      lk += row_gram(r, std::pow(lt, 2.0 * (mk - 1 - j) + 1.0));
      dj = SparseMatrixC((d1 * dj).pruned());
    }
    f.left += SparseMatrixC(e * lk * e.adjoint());

    const SparseMatrixC pk = build_conjugated_ode(mp, s, tau);
    f.right += SparseMatrixC(e * gram(pk, w) * e.adjoint());

    // Conjugated transmission operators at y = 0.
    const SidePoint p0 = side_point(scn, s, 0.0);
    const SystemSide ss = system_side(scn, s, p0.system);
    const std::vector<SparseMatrixC> pw = conjugated_powers(mp, s, tau, mk);
    std::vector<Eigen::RowVectorXcd> first(mk + 1);
    for (int i = 0; i <= mk; ++i)
      first[i] = Eigen::RowVectorXcd(Eigen::MatrixXcd(pw[i] * chi).row(0));
    trows[k] = Eigen::MatrixXcd::Zero(m, n + 1);
    for (int j = 0; j < m; ++j) {
      if (ss.t[j].is_zero()) continue;
      const ComplexPolynomial t = normal_coefficients(ss.t[j], p0.system, mp.xi());
      for (int i = 0; i <= t.degree() && i <= mk; ++i) trows[k].row(j) += t[i] * first[i];
    }
    trows[k] = trows[k] * Eigen::MatrixXcd(e.adjoint());
  }
  const double lt = std::max(lambda_t[0], lambda_t[1]);
  for (int j = 0; j < m; ++j) {
    const double beta = 0.5 * (scn.transmission[j].left.order + scn.transmission[j].right.order);
    const Eigen::RowVectorXcd r = trows[0].row(j) + trows[1].row(j);
    f.right += row_gram(r, std::pow(lt, 2.0 * (m - 0.5 - beta)));
  }
  f.left.prune(Complex(0.0));
  f.right.prune(Complex(0.0));
  return f;
}

RatioResult solve_pencil(const PencilForms& f, const EstimatorOptions& options) {
  RatioResult out;
  double tr = 0.0;
  for (int i = 0; i < f.dim; ++i) tr += f.right.coeff(i, i).real();
  out.eps = options.eps_rel * tr / f.dim;
  if (options.solver == PencilSolver::dense) {
    out.c = top_dense(f, out.eps);
    out.iterations = f.dim;
    return out;
  }

  SparseMatrixC r = f.right + out.eps * identity(f.dim);
  Eigen::SimplicialLLT<SparseMatrixC, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(r);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(r), Eigen::EigenvaluesOnly);
    std::ostringstream os;
    os << "pencil failure: right form not positive definite (eigenvalue "
       << es.eigenvalues().minCoeff() << ")";
    throw Error(os.str());
  }
  // Whitened operator W = G^{-1} L G^{-H} with R + eps I = G G^H.
  auto apply = [&](const Eigen::VectorXcd& y) {
    Eigen::VectorXcd z = llt.matrixU().solve(y);
    if (llt.permutationPinv().size() > 0) z = llt.permutationPinv() * z;
    Eigen::VectorXcd w = f.left * z;
    if (llt.permutationP().size() > 0) w = llt.permutationP() * w;
    return Eigen::VectorXcd(llt.matrixL().solve(w));
  };

  const int dim = f.dim;
  const int kmax = std::min(dim, options.lanczos_max);
  Eigen::MatrixXcd q(dim, kmax + 1);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 0.618 * i);
  q.col(0) = v.normalized();
  std::vector<double> alpha, beta;
  double theta = 0.0;
  for (int k = 0; k < kmax; ++k) {
    Eigen::VectorXcd w = apply(q.col(k));
    alpha.push_back(q.col(k).dot(w).real());
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass)
      w -= q.leftCols(k + 1) * (q.leftCols(k + 1).adjoint() * w);
    const double b = w.norm();
    out.iterations = k + 1;

    const int s = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(s, s);
    for (int i = 0; i < s; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < s; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    theta = es.eigenvalues()(s - 1);
    const double resid = std::abs(b * es.eigenvectors()(s - 1, s - 1));
    if (b <= 1e-14 * std::max(1.0, std::abs(theta)) ||
        resid <= options.lanczos_tol * std::max(std::abs(theta), 1e-300))
      break;
    beta.push_back(b);
    q.col(k + 1) = w / b;
  }
  out.c = std::max(0.0, theta);
  return out;
}

RatioResult carleman_ratio(const ModelProblem& mp, double tau) {
  return solve_pencil(assemble_forms(mp, tau), mp.options());
}

std::vector<double> default_xi_samples() {
  std::vector<double> s;
  for (int i = 0; i < 8; ++i) s.push_back(0.25 * i);
  return s;
}

EstimateCurve sweep(const Scenario& scn, const std::vector<double>& taus,
                    const std::vector<double>& gammas, const std::vector<double>& xi_samples,
                    const EstimatorOptions& options) {
  if (taus.empty() || xi_samples.empty()) throw Error("sweep needs non-empty tau and xi' lists");
  std::vector<double> gs = gammas;
  if (gs.empty()) gs.push_back(scn.weight.gamma());
  if (two_parameter(options) == false && !gammas.empty() &&
      scn.weight.kind() != WeightSpec::Kind::two_parameter)
    throw Error("a gamma list needs a two-parameter weight");

  EstimateCurve curve;
  curve.scenario = scn.name;
  curve.mode = options.mode;
  curve.xi_samples = xi_samples;
  const std::size_t nx = xi_samples.size();
  const std::size_t total = gs.size() * taus.size() * nx;
  std::vector<RatioResult> results(total);
  std::vector<Scenario> per_gamma;
  for (double g : gs)
    per_gamma.push_back(scn.weight.kind() == WeightSpec::Kind::two_parameter ? with_gamma(scn, g)
                                                                              : scn);

  parallel_for(total, [&](std::size_t idx) {
    const std::size_t gi = idx / (taus.size() * nx);
    const std::size_t ti = (idx / nx) % taus.size();
    const std::size_t si = idx % nx;
    const Scenario& sg = per_gamma[gi];
    double scale = taus[ti];
    if (two_parameter(options)) {
      Eigen::VectorXd x = sg.x0;
      scale = taus[ti] * sg.weight.gamma() * sg.weight.phi(Side::right, x).value;
    }
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(sg.dim - 1);
    xi(0) = xi_samples[si] * scale;
    const ModelProblem mp(sg, xi, options);
    results[idx] = carleman_ratio(mp, taus[ti]);
  });

  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      EstimatePoint p;
      p.tau = taus[ti];
      p.gamma = gs[gi];
      p.grid_n = options.grid_n;
      for (std::size_t si = 0; si < nx; ++si) {
        const RatioResult& r = results[(gi * taus.size() + ti) * nx + si];
        p.per_sample.push_back(r.c);
        if (si == 0 || r.c > p.c) {
          p.c = r.c;
          p.eps = r.eps;
        }
      }
      curve.points.push_back(std::move(p));
    }
  }
  return curve;
}

EstimateCurve sweep_fixed_product(const Scenario& scn, double tau_gamma,
                                  const std::vector<double>& gammas,
                                  const std::vector<double>& xi_samples,
                                  const EstimatorOptions& options) {
  if (gammas.empty()) throw Error("fixed tau*gamma sweep needs a gamma list");
  EstimateCurve out;
  for (double g : gammas) {
    if (!(g > 0.0)) throw Error("gamma must be positive");
    EstimateCurve c = sweep(scn, {tau_gamma / g}, {g}, xi_samples, options);
    if (out.points.empty()) {
      out.scenario = c.scenario;
      out.mode = c.mode;
      out.xi_samples = c.xi_samples;
    }
    out.points.push_back(c.points.front());
  }
  return out;
}

}  // namespace carleman
