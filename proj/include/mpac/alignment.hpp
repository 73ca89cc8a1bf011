#pragma once

#include "mpac/common.hpp"

#include <vector>

namespace mpac {

/// Lower bound on every view weight; keeps gamma / w_i finite when a view
/// aligns perfectly with the consensus.
inline constexpr double kWeightFloor = 1e-8;

/// Binary n x c matrix with exactly one 1 per row, stored as the column
/// index of that 1.
class IndicatorMatrix {
public:
  IndicatorMatrix(std::vector<int> assignment, int clusters);

  /// Validates entries in {0, 1} and unit row sums.
  static IndicatorMatrix from_dense(const Matrix& y);

  const std::vector<int>& assignment() const { return assignment_; }
  int clusters() const { return clusters_; }
  Index rows() const { return static_cast<Index>(assignment_.size()); }
  std::vector<int> column_sizes() const;
  Matrix dense() const;

  friend bool operator==(const IndicatorMatrix&, const IndicatorMatrix&) = default;

private:
  std::vector<int> assignment_;
  int clusters_;
};

/// c x c orthogonal matrix, ||R^T R - I||_F <= 1e-10.
class RotationMatrix {
public:
  explicit RotationMatrix(Matrix r);
  static RotationMatrix identity(Index c);

  const Matrix& matrix() const { return r_; }

private:
  Matrix r_;
};

/// Point on the probability simplex with every entry >= kWeightFloor.
class ViewWeights {
public:
  explicit ViewWeights(Vector w);
  static ViewWeights uniform(std::size_t v);

  const Vector& values() const { return w_; }
  double operator[](std::size_t i) const { return w_(static_cast<Index>(i)); }
  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }

private:
  Vector w_;
};

/// Orthogonal Procrustes: R = U V^T from the SVD F^T Y = U S V^T, the
/// minimizer of ||Y - F R||_F over orthogonal R.
RotationMatrix update_rotation(const Matrix& f, const IndicatorMatrix& y);

struct ClusterRepair {
  int sample;
  int from;
  int to;
};

struct IndicatorUpdate {
  IndicatorMatrix y;
  Matrix scores;                      // sum_i F_i R_i / w_i
  std::vector<ClusterRepair> repairs; // empty-cluster moves, in order applied
};

/// Row argmax of `scores` (ties to the lowest column), then one sample moved
/// into each empty column in ascending column order. The moved sample is the
/// one with the largest scores(i, empty) - scores(i, current) among samples
/// whose cluster would stay non-empty.
IndicatorUpdate indicator_from_scores(const Matrix& scores);

/// Consensus step: maximizes Tr(Y^T sum_i F_i R_i / w_i) over indicators,
/// summing views in ascending order.
IndicatorUpdate update_indicator(const std::vector<Matrix>& fs,
                                 const std::vector<RotationMatrix>& rs,
                                 const ViewWeights& w);

/// Minimizer of sum q_i^2 / w_i over the simplex with w_i >= kWeightFloor.
/// With no floor active this is w_i = q_i / sum_j q_j.
ViewWeights update_weights(const Vector& q);

/// ||Y - F R||_F
double alignment_residual(const Matrix& f, const RotationMatrix& r,
                          const IndicatorMatrix& y);
double alignment_residual(const Matrix& f, const Matrix& r, const Matrix& y);

}  // namespace mpac
