#pragma once

#include "mpac/common.hpp"
#include "mpac/dataset.hpp"

#include <vector>

namespace mpac {

/// Cached Cholesky factor of (alpha*I + X^T X). Built once per view and
/// reused for every column solve of every outer iteration.
class ViewFactorization {
public:
  ViewFactorization(const Matrix& x, double alpha);

  const Matrix& gram() const { return gram_; }
  double alpha() const { return alpha_; }
  Index size() const { return gram_.rows(); }

  /// (alpha*I + X^T X)^{-1} rhs
  Matrix solve(const Matrix& rhs) const;
  /// (alpha*I + X^T X) z
  Matrix apply(const Matrix& z) const;

private:
  Matrix gram_;
  double alpha_;
  Eigen::LLT<Matrix> llt_;
};

ViewFactorization build_factorization(const ViewMatrix& x, double alpha);

/// Raw self-expression coefficients plus the symmetrized nonnegative
/// affinity and its Laplacian.
struct SimilarityGraph {
  Matrix s;         // zero diagonal
  Matrix w_sym;     // symmetric, nonnegative, zero diagonal
  Matrix laplacian; // D - w_sym
};

struct LaplacianParts {
  Matrix w_sym;
  Matrix laplacian;
};

/// w_sym = max(0, (s + s^T)/2) with zero diagonal, L = diag(w_sym 1) - w_sym.
LaplacianParts build_laplacian(const Matrix& s);

/// h(i,j) = ||F_i - F_j||^2 over rows of f; symmetric with zero diagonal.
Matrix embedding_distances(const Matrix& f);

/// Column solve s_i = (alpha*I + X^T X)^{-1} [(X^T X)_i - (beta/4) h_i]
/// before diagonal zeroing. Exposed for checks against the stationarity
/// condition; update_s is the normal entry point.
Matrix solve_self_expression(const ViewFactorization& fact, const Matrix& f,
                             double beta);

/// Graph step: closed-form column solves, diagonal zeroed, affinity and
/// Laplacian rebuilt. f must have orthonormal columns (to 1e-6).
SimilarityGraph update_s(const ViewFactorization& fact, const Matrix& f, double beta);

/// Graph for given raw coefficients (diagonal is zeroed here).
SimilarityGraph make_graph(Matrix s);

/// Tr(F^T L F).
double spectral_energy(const Matrix& laplacian, const Matrix& f);

struct ConnectivityReport {
  int count = 0;          // eigenvalues below tol among the c smallest
  Vector eigenvalues;     // the c smallest, ascending
};

/// Counts near-zero Laplacian eigenvalues. Diagnostic only.
ConnectivityReport connectivity_defect(const Matrix& laplacian, int c, double tol);

}  // namespace mpac
