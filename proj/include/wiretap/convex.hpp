#pragma once

#include <string>
#include <vector>

#include "wiretap/linalg.hpp"

namespace wiretap {

using RMatrix = Eigen::MatrixXd;

/// Real symmetric embedding [Re A, -Im A; Im A, Re A] of a hermitian matrix.
/// Eigenvalues are those of A, each doubled in multiplicity; traces double.
RMatrix embed_hermitian(const CMatrix& a);
/// Inverse of embed_hermitian. Symmetric inputs without the block structure
/// are projected onto it first (average of the two diagonal and the two
/// off-diagonal blocks).
CMatrix deembed_hermitian(const RMatrix& e);

// ---------------------------------------------------------------------------
// Linear-objective semidefinite programs
// ---------------------------------------------------------------------------

/// Handle to a hermitian matrix variable of an SdpProblem.
struct HermVar {
  int id = -1;
};
/// Handle to a real scalar variable of an SdpProblem.
struct ScalarVar {
  int id = -1;
};

/// Real affine function: constant + sum coef * scalar + sum Re tr(C * X).
struct LinearForm {
  double constant = 0.0;
  std::vector<std::pair<ScalarVar, double>> scalars;
  std::vector<std::pair<HermVar, CMatrix>> traces;

  LinearForm& add(ScalarVar v, double coef) {
    scalars.emplace_back(v, coef);
    return *this;
  }
  LinearForm& add(HermVar v, CMatrix coef) {
    traces.emplace_back(v, std::move(coef));
    return *this;
  }
  LinearForm& add(double c) {
    constant += c;
    return *this;
  }
};

/// Hermitian-valued affine function:
/// constant + sum scalar * C + sum weight * A X A^H.
struct HermitianForm {
  CMatrix constant;
  std::vector<std::pair<ScalarVar, CMatrix>> scalars;
  struct Congruence {
    HermVar var;
    CMatrix map;
    double weight = 1.0;
  };
  std::vector<Congruence> congruences;

  explicit HermitianForm(int n) : constant(CMatrix::Zero(n, n)) {}

  HermitianForm& add(ScalarVar v, CMatrix coef) {
    scalars.emplace_back(v, std::move(coef));
    return *this;
  }
  HermitianForm& add(HermVar v, CMatrix map, double weight = 1.0) {
    congruences.push_back({v, std::move(map), weight});
    return *this;
  }
};

enum class SdpStatus { kOptimal, kInfeasible, kNumericalFailure };

std::string to_string(SdpStatus s);

struct SdpOptions {
  /// Relative duality gap target.
  double accuracy = 1e-7;
  /// Relative primal/dual residual target.
  double feasibility = 1e-9;
  int max_iterations = 100;
  /// When the iterations stall, the best iterate with relative gap below
  /// max(accuracy, stall_accuracy) and residuals below stall_feasibility is
  /// still reported as optimal.
  double stall_feasibility = 1e-7;
  double stall_accuracy = 1e-5;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kNumericalFailure;
  double value = 0.0;
  std::vector<CMatrix> hermitian_values;
  std::vector<double> scalar_values;
  int iterations = 0;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;

  const CMatrix& operator[](HermVar v) const { return hermitian_values.at(v.id); }
  double operator[](ScalarVar v) const { return scalar_values.at(v.id); }
};

/// maximize a linear form subject to LMIs, linear equalities and linear
/// inequalities over hermitian-matrix and scalar variables. Hermitian
/// constraints are embedded as real symmetric blocks of twice the size;
/// equalities are eliminated by a null-space parametrization before the
/// interior-point iterations start.
class SdpProblem {
 public:
  /// n x n hermitian variable; `psd` adds the constraint X >= 0.
  HermVar add_hermitian(int n, bool psd = true);
  /// Scalar variable; `nonnegative` adds x >= 0.
  ScalarVar add_scalar(bool nonnegative = false);

  void maximize(LinearForm objective) { objective_ = std::move(objective); }
  void minimize(LinearForm objective);

  /// form >= 0 (positive semidefinite).
  void add_lmi(HermitianForm form);
  /// form == 0.
  void add_equality(LinearForm form);
  /// form >= 0.
  void add_inequality(LinearForm form);

  int hermitian_dim(HermVar v) const { return herm_dims_.at(v.id); }
  int num_real_variables() const;

  /// Evaluates a form at a candidate point given in the same layout as
  /// SdpSolution.
  double evaluate(const LinearForm& form, const std::vector<CMatrix>& herm,
                  const std::vector<double>& scal) const;
  CMatrix evaluate(const HermitianForm& form, const std::vector<CMatrix>& herm,
                   const std::vector<double>& scal) const;

  SdpSolution solve(const SdpOptions& options = {}) const;

 private:
  friend struct SdpCompiler;
  std::vector<int> herm_dims_;
  std::vector<bool> herm_psd_;
  std::vector<bool> scalar_nonneg_;
  LinearForm objective_;
  bool minimize_ = false;
  std::vector<HermitianForm> lmis_;
  std::vector<LinearForm> equalities_;
  std::vector<LinearForm> inequalities_;
};

/// Wrapper matching the service contract: solve `p` to the given relative gap.
SdpSolution solve_sdp(const SdpProblem& p, double accuracy = 1e-7);

// ---------------------------------------------------------------------------
// Concave log-det maximization over trace-bounded PSD blocks
// ---------------------------------------------------------------------------

/// weight * ln det(I + sum_b A_b Q_b A_b^H); every map in a term has the same
/// row count.
struct LogDetTerm {
  double weight = 1.0;
  std::vector<std::pair<int, CMatrix>> maps;
};

/// maximize sum of log-det terms + sum_b Re tr(L_b Q_b)
/// subject to Q_b >= 0 and sum_b tr(Q_b) <= budget.
struct LogDetProblem {
  std::vector<int> block_dims;
  std::vector<LogDetTerm> terms;
  /// Per-block linear coefficients (hermitian). Empty means zero.
  std::vector<CMatrix> linear;
  double budget = 1.0;

  double objective(const std::vector<CMatrix>& q) const;
  std::vector<CMatrix> gradient(const std::vector<CMatrix>& q) const;
};

struct LogDetOptions {
  double tol = 1e-6;
  int max_iterations = 200;
  double initial_step = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
};

struct LogDetSolution {
  double value = 0.0;
  std::vector<CMatrix> blocks;
  /// Objective after every accepted step, starting with the initial point.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/// Euclidean projection onto {Q_b >= 0, sum tr(Q_b) <= budget}.
std::vector<CMatrix> project_trace_budget(const std::vector<CMatrix>& q,
                                          double budget);

/// Projected gradient ascent with Armijo backtracking. `start` defaults to
/// zero blocks; it is projected onto the feasible set first.
LogDetSolution solve_logdet_max(const LogDetProblem& p,
                                std::vector<CMatrix> start = {},
                                const LogDetOptions& options = {});

}  // namespace wiretap
