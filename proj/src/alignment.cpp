#include "mpac/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpac {

IndicatorMatrix::IndicatorMatrix(std::vector<int> assignment, int clusters)
    : assignment_(std::move(assignment)), clusters_(clusters) {
  if (clusters_ < 1) throw Error(ErrorKind::InvalidInput, "indicator needs c >= 1");
  for (int a : assignment_) {
    if (a < 0 || a >= clusters_) {
      throw Error(ErrorKind::InvalidInput, "indicator column out of range");
    }
  }
}

IndicatorMatrix IndicatorMatrix::from_dense(const Matrix& y) {
  std::vector<int> assignment(static_cast<std::size_t>(y.rows()), -1);
  for (Index i = 0; i < y.rows(); ++i) {
    int ones = 0;
    for (Index j = 0; j < y.cols(); ++j) {
      if (y(i, j) == 1.0) {
        ++ones;
        assignment[static_cast<std::size_t>(i)] = static_cast<int>(j);
      } else if (y(i, j) != 0.0) {
        throw Error(ErrorKind::InvalidInput, "indicator entries must be 0 or 1");
      }
    }
    if (ones != 1) {
      throw Error(ErrorKind::InvalidInput, "indicator rows must contain exactly one 1");
    }
  }
  return IndicatorMatrix(std::move(assignment), static_cast<int>(y.cols()));
}

std::vector<int> IndicatorMatrix::column_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(clusters_), 0);
  for (int a : assignment_) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

Matrix IndicatorMatrix::dense() const {
  Matrix y = Matrix::Zero(rows(), clusters_);
  for (Index i = 0; i < rows(); ++i) y(i, assignment_[static_cast<std::size_t>(i)]) = 1.0;
  return y;
}

RotationMatrix::RotationMatrix(Matrix r) : r_(std::move(r)) {
  if (r_.rows() != r_.cols()) throw Error(ErrorKind::ShapeMismatch, "rotation must be square");
  if (orthonormality_defect(r_) > 1e-10) {
    throw Error(ErrorKind::InvalidInput, "rotation is not orthogonal");
  }
}

RotationMatrix RotationMatrix::identity(Index c) {
  return RotationMatrix(Matrix::Identity(c, c));
}

ViewWeights::ViewWeights(Vector w) : w_(std::move(w)) {
  if (w_.size() < 1) throw Error(ErrorKind::InvalidInput, "weights need at least one view");
  if ((w_.array() < kWeightFloor).any() || !w_.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "weights must be finite and >= floor");
  }
  if (std::abs(w_.sum() - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidInput, "weights must sum to 1");
  }
}

ViewWeights ViewWeights::uniform(std::size_t v) {
  return ViewWeights(Vector::Constant(static_cast<Index>(v), 1.0 / static_cast<double>(v)));
}

RotationMatrix update_rotation(const Matrix& f, const IndicatorMatrix& y) {
  if (f.rows() != y.rows() || f.cols() != y.clusters()) {
    throw Error(ErrorKind::ShapeMismatch, "embedding and indicator shapes differ");
  }
  const Matrix fty = f.transpose() * y.dense();
  Eigen::JacobiSVD<Matrix> svd(fty, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalError, "SVD of F^T Y failed");
  }
  return RotationMatrix(svd.matrixU() * svd.matrixV().transpose());
}

IndicatorUpdate indicator_from_scores(const Matrix& scores) {
  const Index n = scores.rows();
  const Index c = scores.cols();
  if (c < 1 || n < c) {
    throw Error(ErrorKind::InvalidInput, "score matrix needs 1 <= c <= n");
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    for (Index j = 1; j < c; ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }

  std::vector<int> sizes(static_cast<std::size_t>(c), 0);
  for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
  std::vector<ClusterRepair> repairs;
  for (Index j = 0; j < c; ++j) {
    if (sizes[static_cast<std::size_t>(j)] > 0) continue;
    Index pick = -1;
    double best_gap = 0.0;
    for (Index i = 0; i < n; ++i) {
      const int cur = assignment[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(cur)] < 2) continue;
      const double gap = scores(i, j) - scores(i, cur);
      if (pick < 0 || gap > best_gap) {
        pick = i;
        best_gap = gap;
      }
    }
    const int from = assignment[static_cast<std::size_t>(pick)];
    --sizes[static_cast<std::size_t>(from)];
    ++sizes[static_cast<std::size_t>(j)];
    assignment[static_cast<std::size_t>(pick)] = static_cast<int>(j);
    repairs.push_back({static_cast<int>(pick), from, static_cast<int>(j)});
  }
  return IndicatorUpdate{IndicatorMatrix(std::move(assignment), static_cast<int>(c)),
                         scores, std::move(repairs)};
}

IndicatorUpdate update_indicator(const std::vector<Matrix>& fs,
                                 const std::vector<RotationMatrix>& rs,
                                 const ViewWeights& w) {
  if (fs.empty() || fs.size() != rs.size() || fs.size() != w.size()) {
    throw Error(ErrorKind::ShapeMismatch, "need one embedding, rotation and weight per view");
  }
  Matrix scores = Matrix::Zero(fs.front().rows(), fs.front().cols());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].rows() != scores.rows() || fs[i].cols() != scores.cols()) {
      throw Error(ErrorKind::ShapeMismatch, "embeddings differ in shape");
    }
    scores += (fs[i] * rs[i].matrix()) / w[i];
  }
  return indicator_from_scores(scores);
}

ViewWeights update_weights(const Vector& q) {
  const Index v = q.size();
  if (v < 1) throw Error(ErrorKind::InvalidInput, "need at least one residual");
  if ((q.array() < 0.0).any() || !q.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "residuals must be finite and non-negative");
  }
  std::vector<Index> order(static_cast<std::size_t>(v));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return q(a) > q(b); });

  // The k largest residuals stay proportional to q, the rest sit on the floor;
  // k is the largest count whose smallest member clears the floor.
  Vector w = Vector::Constant(v, 1.0 / static_cast<double>(v));
  double top_sum = 0.0;
  std::vector<double> prefix;
  for (Index idx : order) prefix.push_back(top_sum += q(idx));
  for (Index k = v; k >= 1; --k) {
    const double total = prefix[static_cast<std::size_t>(k - 1)];
    if (total <= 0.0) continue;
    const double mass = 1.0 - static_cast<double>(v - k) * kWeightFloor;
    const double denom = total / mass;
    if (q(order[static_cast<std::size_t>(k - 1)]) / denom >= kWeightFloor) {
      for (Index r = 0; r < v; ++r) {
        const Index idx = order[static_cast<std::size_t>(r)];
        w(idx) = r < k ? q(idx) / denom : kWeightFloor;
      }
      break;
    }
  }
  return ViewWeights(std::move(w));
}

double alignment_residual(const Matrix& f, const Matrix& r, const Matrix& y) {
  if (f.rows() != y.rows() || f.cols() != r.rows() || r.cols() != y.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "alignment residual shapes differ");
  }
  return (y - f * r).norm();
}

double alignment_residual(const Matrix& f, const RotationMatrix& r,
                          const IndicatorMatrix& y) {
  return alignment_residual(f, r.matrix(), y.dense());
}

}  // namespace mpac
