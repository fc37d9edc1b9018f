// SPDX-License-Identifier: Apache-2.0

#include "carleman/polynomial.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace carleman {

namespace {

// Parlett-Reinsch balancing by powers of two; leaves eigenvalues unchanged.
void balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

ComplexPolynomial from_roots(std::span<const Complex> rs) {
  ComplexPolynomial p = ComplexPolynomial::constant(1.0);
  for (const Complex& r : rs) p = p * ComplexPolynomial::linear_factor(r);
  return p;
}

double relative_coefficient_error(const ComplexPolynomial& candidate,
                                  const ComplexPolynomial& reference) {
  const int n = std::max(candidate.degree(), reference.degree()) + 1;
  const auto a = candidate.padded(n);
  const auto b = reference.padded(n);
  const double scale = b.cwiseAbs().maxCoeff();
  const double diff = (a - b).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<Complex> roots(const ComplexPolynomial& p) {
  const int d = p.degree();
  if (d < 1) throw Error("constant polynomial has no roots");
  const Complex lead = p.leading();

  std::vector<Complex> out;
  out.reserve(d);
  if (d == 1) {
    out.push_back(-p[0] / lead);
    return out;
  }

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) companion(0, k) = -p[d - 1 - k] / lead;
  for (int k = 1; k < d; ++k) companion(k, k - 1) = 1.0;
  balance(companion);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw Error("companion eigenvalue iteration failed");

  const ComplexPolynomial dp = p.derivative();
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    Complex z = solver.eigenvalues()(k);
    double fz = std::abs(p(z));
    for (int it = 0; it < 5 && fz > 0.0; ++it) {
      const Complex dz = dp(z);
      if (dz == Complex(0.0)) break;
      const Complex next = z - p(z) / dz;
      const double fn = std::abs(p(next));
      if (!(fn < fz)) break;
      z = next;
      fz = fn;
    }
    out.push_back(z);
  }
  // Deterministic order independent of the eigensolver's.
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

namespace {

std::vector<RootCluster> cluster_with_labels(std::span<const Complex> rs, double delta,
                                             std::vector<std::size_t>& label) {
  if (!(delta > 0.0)) throw Error("clustering radius must be positive");
  const std::size_t n = rs.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t i, std::size_t j) {
    i = find(i);
    j = find(j);
    if (i != j) parent[std::max(i, j)] = std::min(i, j);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(rs[i] - rs[j]) <= delta) unite(i, j);

  // Merge components whose means end up within delta, so reported centers
  // stay separated by more than the radius.
  for (;;) {
    std::vector<Complex> sum(n, 0.0);
    std::vector<int> count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[find(i)] += rs[i];
      ++count[find(i)];
    }
    bool merged = false;
    for (std::size_t i = 0; i < n && !merged; ++i) {
      if (find(i) != i) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (find(j) != j) continue;
        if (std::abs(sum[i] / double(count[i]) - sum[j] / double(count[j])) <= delta) {
          unite(i, j);
          merged = true;
          break;
        }
      }
    }
    if (!merged) break;
  }

  std::vector<RootCluster> out;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.push_back({0.0, 0});
    }
    out[slot[r]].center += rs[i];
    ++out[slot[r]].multiplicity;
  }
  label.resize(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<std::size_t>(slot[find(i)]);
  for (auto& c : out) c.center /= double(c.multiplicity);
  return out;
}

}  // namespace

std::vector<RootCluster> cluster_multiplicities(std::span<const Complex> rs, double delta) {
  std::vector<std::size_t> label;
  return cluster_with_labels(rs, delta, label);
}

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::positive: return "POS";
    case RootClass::negative: return "NEG";
    case RootClass::zero: return "ZERO";
  }
  return "?";
}

int RootSplit::count(RootClass c) const {
  int total = 0;
  for (const auto& e : entries)
    if (e.root_class == c) total += e.multiplicity;
  return total;
}

double default_eps_im(std::span<const Complex> rs) {
  double mx = 1.0;
  for (const auto& r : rs) mx = std::max(mx, std::abs(r));
  return 1e-7 * mx;
}

double default_delta(std::span<const Complex> rs) {
  double mx = 1.0;
  for (const auto& r : rs) mx = std::max(mx, std::abs(r));
  return 1e-5 * mx;
}

ComplexPolynomial Split::reconstruct() const {
  return ComplexPolynomial::constant(lead) * p_plus * p_minus * p_zero;
}

Split split(const ComplexPolynomial& p, const SplitOptions& options) {
  if (p.is_zero()) throw Error("cannot split the zero polynomial");
  Split out;
  out.lead = p.leading();
  out.p_plus = out.p_minus = out.p_zero = ComplexPolynomial::constant(1.0);
  out.roots.source_degree = p.degree();
  if (p.degree() == 0) {
    out.roots.eps_im = options.eps_im.value_or(1e-7);
    out.roots.delta = options.delta.value_or(1e-5);
    return out;
  }

  const std::vector<Complex> rs = roots(p);
  const double eps = options.eps_im.value_or(default_eps_im(rs));
  const double delta = options.delta.value_or(default_delta(rs));
  if (!(eps > 0.0) || !(delta > 0.0)) throw Error("eps_im and delta must be positive");
  out.roots.eps_im = eps;
  out.roots.delta = delta;

  std::vector<std::size_t> label;
  const auto clusters = cluster_with_labels(rs, delta, label);
  auto classify = [eps](Complex z) {
    if (z.imag() > eps) return RootClass::positive;
    if (z.imag() < -eps) return RootClass::negative;
    return RootClass::zero;
  };
  for (const auto& c : clusters)
    out.roots.entries.push_back({c.center, c.multiplicity, classify(c.center)});

  // Factors are built from the individual roots of each cluster, which keeps
  // the reconstruction at the accuracy of the root finder.
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto lin = ComplexPolynomial::linear_factor(rs[i]);
    switch (out.roots.entries[label[i]].root_class) {
      case RootClass::positive: out.p_plus = out.p_plus * lin; break;
      case RootClass::negative: out.p_minus = out.p_minus * lin; break;
      case RootClass::zero: out.p_zero = out.p_zero * lin; break;
    }
  }
  return out;
}

ComplexPolynomial kappa(const Split& sp) { return sp.p_plus * sp.p_zero; }

}  // namespace carleman
