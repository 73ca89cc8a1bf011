#pragma once

#include "mpac/common.hpp"

#include <string_view>
#include <vector>

namespace mpac {

/// min Tr(F^T M F) - 2 Tr(F^T B)  subject to F^T F = I.
///
/// In the embedding step M = beta * L and B = (gamma / w) * Y * R^T; the
/// alignment penalty's constant part (||Y||^2 + ||FR||^2 = n + c) is dropped.
class StiefelProblem {
public:
  StiefelProblem(Matrix m, Matrix b);

  const Matrix& m() const { return m_; }
  const Matrix& b() const { return b_; }

  double objective(const Matrix& f) const;
  /// Euclidean gradient 2MF - 2B.
  Matrix gradient(const Matrix& f) const;

private:
  Matrix m_;
  Matrix b_;
};

struct StiefelSolverConfig {
  int max_inner_iters = 200;
  double grad_tol = 1e-6;
  double armijo_c = 1e-4;
  double step_init = 1e-2;
  bool bb_steps = true;

  void validate() const;
};

enum class StiefelStatus { Converged, MaxIterations, Stalled };

std::string_view to_string(StiefelStatus status);

struct StiefelResult {
  Matrix f;
  StiefelStatus status = StiefelStatus::MaxIterations;
  int iterations = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  // One entry for the start point and one per accepted step.
  std::vector<double> objective_history;
  std::vector<double> feasibility_history;
};

/// G - F sym(F^T G): the gradient projected onto the tangent space at F.
Matrix riemannian_gradient(const StiefelProblem& p, const Matrix& f);

/// Frobenius norm of riemannian_gradient. Assumes F^T F = I.
double riemannian_grad_norm(const StiefelProblem& p, const Matrix& f);

/// Curvilinear search with the Cayley retraction
///   F(tau) = (I + tau/2 A)^{-1} (I - tau/2 A) F,  A = G F^T - F G^T,
/// Armijo backtracking on tau and optional Barzilai-Borwein trial steps.
/// The Cayley system is solved in its rank-2c form, so each trial step
/// costs one 2c x 2c LU instead of an n x n solve.
StiefelResult solve_stiefel(const StiefelProblem& p, const Matrix& f0,
                            const StiefelSolverConfig& cfg = {});

}  // namespace mpac
