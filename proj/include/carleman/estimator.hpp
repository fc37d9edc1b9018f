// SPDX-License-Identifier: Apache-2.0
//
// Best constants of the Carleman inequality for Fourier-reduced
// one-dimensional transmission models. Each side lives on [0, L] in the
// system coordinates; the unknown is masked so that it vanishes with its
// derivatives near y = L, and the constant is the top eigenvalue of the
// pencil (left form, right form + eps I).

#ifndef CARLEMAN_ESTIMATOR_HPP
#define CARLEMAN_ESTIMATOR_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "carleman/symbols.hpp"

namespace carleman {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;

enum class EstimateMode {
  /// tau^{-1} |u|^2_{m,tau} + traces, tau-weights.
  standard,
  /// Two-parameter weight, tau~ = tau gamma phi, prefactor tau~^{-1}.
  two_parameter,
  /// As two_parameter with prefactor gamma tau~^{-1}.
  simple_characteristic,
};

const char* to_string(EstimateMode mode);

enum class PencilSolver { lanczos, dense };

struct EstimatorOptions {
  double length = 1.0;
  int grid_n = 400;
  EstimateMode mode = EstimateMode::standard;
  PencilSolver solver = PencilSolver::lanczos;
  /// eps = eps_rel * trace(R) / dim
  double eps_rel = 1e-12;
  double tau_floor = 1.0;
  int lanczos_max = 400;
  double lanczos_tol = 1e-10;
};

class ModelProblem {
 public:
  /// Freezes the scenario at x0' with the tangential covector xi'. The weight
  /// must depend only on x_n.
  ModelProblem(const Scenario& scn, Eigen::VectorXd xi_tangential, EstimatorOptions options = {});

  const Scenario& scenario() const { return scn_; }
  const Eigen::VectorXd& xi() const { return xi_; }
  const EstimatorOptions& options() const { return opt_; }
  int n() const { return opt_.grid_n; }
  double h() const { return opt_.length / opt_.grid_n; }
  /// Grid points y_0 = 0 .. y_N = L.
  Eigen::VectorXd grid() const;
  /// Cutoff: 1 on [0, L/2], 0 on [7L/8, L], squared smoothstep between.
  const Eigen::VectorXd& mask() const { return mask_; }

 private:
  Scenario scn_;
  Eigen::VectorXd xi_;
  EstimatorOptions opt_;
  Eigen::VectorXd mask_;
};

/// 4th order first-derivative matrix on N + 1 points, one-sided near the ends.
SparseMatrixC derivative_matrix(int n, double h);

/// Weight as seen on side k in system coordinates: phi(y), phi'(y).
struct SideWeight {
  Eigen::VectorXd value;
  Eigen::VectorXd slope;
};
SideWeight side_weight(const ModelProblem& mp, Side side);

/// sum_j p_{k,j}(xi') (D + i tau phi'(y))^j applied to mask * v
/// (minus tau^{m_k} with the eigenvalue shift).
SparseMatrixC build_conjugated_ode(const ModelProblem& mp, Side side, double tau);

/// Interior norm |u|^2_{m,tau} of u = mask * v as a Hermitian form, with a
/// pointwise tau(y) and prefactor(y).
SparseMatrixC interior_norm_form(const ModelProblem& mp, int order, const Eigen::VectorXd& tau,
                                 const Eigen::VectorXd& prefactor);

/// sum_{q<=m} tau^{2(m-q)} sum_b C(q,b) |xi'|^{2(q-b)} |D^b u|_h^2 computed
/// directly for one vector.
double interior_norm(const ModelProblem& mp, int order, double tau, const Eigen::VectorXcd& v);

struct PencilForms {
  SparseMatrixC left;
  SparseMatrixC right;
  /// Unknown ordering: left side reversed (y_N .. y_0), then right y_0 .. y_N.
  int dim = 0;
};

/// Two-parameter modes take gamma from the scenario weight.
PencilForms assemble_forms(const ModelProblem& mp, double tau);

struct RatioResult {
  double c = 0.0;
  double eps = 0.0;
  int iterations = 0;
};

/// Largest eigenvalue of (L, R + eps I). Throws Error if R + eps I is not
/// positive definite.
RatioResult carleman_ratio(const ModelProblem& mp, double tau);

/// Top generalized eigenvalue of an assembled pencil.
RatioResult solve_pencil(const PencilForms& f, const EstimatorOptions& options);

struct EstimatePoint {
  double tau = 0.0;
  double gamma = 1.0;
  /// max over the xi' samples
  double c = 0.0;
  double eps = 0.0;
  int grid_n = 0;
  std::vector<double> per_sample;
};

struct EstimateCurve {
  std::string scenario;
  EstimateMode mode = EstimateMode::standard;
  /// xi' = s * tau (tau~(0) in two-parameter modes) along e_1.
  std::vector<double> xi_samples;
  std::vector<EstimatePoint> points;
};

/// Evaluates C at every (tau, gamma, xi') and records the max over xi'.
/// `gammas` empty means gamma = 1 (or the scenario's gamma).
EstimateCurve sweep(const Scenario& scn, const std::vector<double>& taus,
                    const std::vector<double>& gammas, const std::vector<double>& xi_samples,
                    const EstimatorOptions& options = {});

/// One point per gamma with tau = tau_gamma / gamma.
EstimateCurve sweep_fixed_product(const Scenario& scn, double tau_gamma,
                                  const std::vector<double>& gammas,
                                  const std::vector<double>& xi_samples,
                                  const EstimatorOptions& options = {});

/// Eight relative samples 0, 1/4, ..., 7/4.
std::vector<double> default_xi_samples();

}  // namespace carleman

#endif  // CARLEMAN_ESTIMATOR_HPP
