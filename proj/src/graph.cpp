#include "mpac/graph.hpp"

#include <algorithm>

namespace mpac {

ViewFactorization::ViewFactorization(const Matrix& x, double alpha)
    : gram_(x.transpose() * x), alpha_(alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "alpha must be positive");
  }
  Matrix system = gram_;
  system.diagonal().array() += alpha_;
  llt_.compute(system);
  if (llt_.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalError, "Cholesky of (alpha*I + X^T X) failed");
  }
}

Matrix ViewFactorization::solve(const Matrix& rhs) const { return llt_.solve(rhs); }

Matrix ViewFactorization::apply(const Matrix& z) const {
  return gram_ * z + alpha_ * z;
}

ViewFactorization build_factorization(const ViewMatrix& x, double alpha) {
  return ViewFactorization(x.data(), alpha);
}

LaplacianParts build_laplacian(const Matrix& s) {
  if (s.rows() != s.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "coefficient matrix must be square");
  }
  LaplacianParts out;
  out.w_sym = (0.5 * (s + s.transpose())).cwiseMax(0.0);
  out.w_sym.diagonal().setZero();
  out.laplacian = -out.w_sym;
  out.laplacian.diagonal() = out.w_sym.rowwise().sum();
  return out;
}

Matrix embedding_distances(const Matrix& f) {
  const Vector sq = f.rowwise().squaredNorm();
  const Index n = f.rows();
  Matrix h = -2.0 * (f * f.transpose());
  h.colwise() += sq;
  h.rowwise() += sq.transpose();
  h = h.cwiseMax(0.0);
  h.diagonal().setZero();
  // symmetric by construction up to rounding in the product
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) h(j, i) = h(i, j);
  }
  return h;
}

Matrix solve_self_expression(const ViewFactorization& fact, const Matrix& f,
                             double beta) {
  if (f.rows() != fact.size()) {
    throw Error(ErrorKind::ShapeMismatch, "embedding rows do not match sample count");
  }
  if (beta == 0.0) return fact.solve(fact.gram());
  // Columns of gram are the (symmetric) rows the closed form asks for.
  return fact.solve(fact.gram() - (beta / 4.0) * embedding_distances(f));
}

SimilarityGraph make_graph(Matrix s) {
  s.diagonal().setZero();
  auto parts = build_laplacian(s);
  return SimilarityGraph{std::move(s), std::move(parts.w_sym), std::move(parts.laplacian)};
}

SimilarityGraph update_s(const ViewFactorization& fact, const Matrix& f, double beta) {
  if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidInput, "beta must be non-negative");
  if (orthonormality_defect(f) > 1e-6) {
    throw Error(ErrorKind::InvalidInput, "embedding does not have orthonormal columns");
  }
  return make_graph(solve_self_expression(fact, f, beta));
}

double spectral_energy(const Matrix& laplacian, const Matrix& f) {
  return (f.transpose() * laplacian * f).trace();
}

ConnectivityReport connectivity_defect(const Matrix& laplacian, int c, double tol) {
  if (c < 1 || c > laplacian.rows()) {
    throw Error(ErrorKind::InvalidInput, "c must lie in 1..n");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalError, "Laplacian eigensolver did not converge");
  }
  ConnectivityReport out;
  out.eigenvalues = eig.eigenvalues().head(c);
  out.count = static_cast<int>((out.eigenvalues.array() < tol).count());
  return out;
}

}  // namespace mpac
