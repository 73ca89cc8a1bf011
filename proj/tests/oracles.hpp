#pragma once
// Slow, direct reference computations used to check the library. None of
// these call into mpac beyond plain types.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

// Orthonormal n x c via Householder QR of a Gaussian matrix; with the sign
// fix below this is Haar-distributed on O(n) when c == n.
inline MatrixXd random_orthonormal(int n, int c, std::mt19937_64& rng) {
  const MatrixXd g = gaussian(n, c, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, c);
  const MatrixXd r = qr.matrixQR().topLeftCorner(c, c);
  for (int j = 0; j < c; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

// argmin_s ||x_i - X s||^2 + alpha ||s||^2 as a least-squares problem on the
// stacked system [X; sqrt(alpha) I] s = [x_i; 0], solved by column-pivoted QR.
inline VectorXd ridge_column(const MatrixXd& x, double alpha, int i) {
  const int m = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  MatrixXd a(m + n, n);
  a << x, std::sqrt(alpha) * MatrixXd::Identity(n, n);
  VectorXd rhs = VectorXd::Zero(m + n);
  rhs.head(m) = x.col(i);
  return a.colPivHouseholderQr().solve(rhs);
}

inline double stiefel_objective(const MatrixXd& m, const MatrixXd& b, const MatrixXd& f) {
  double quad = 0.0;
  double lin = 0.0;
  for (int j = 0; j < f.cols(); ++j) {
    quad += f.col(j).dot(m * f.col(j));
    lin += f.col(j).dot(b.col(j));
  }
  return quad - 2.0 * lin;
}

// Central difference of fn at x along direction d.
inline double directional_fd(const std::function<double(const MatrixXd&)>& fn,
                             const MatrixXd& x, const MatrixXd& d, double h = 1e-6) {
  return (fn(x + h * d) - fn(x - h * d)) / (2.0 * h);
}

// Every labeling of n samples into c columns, encoded base c.
inline std::vector<int> decode_labels(std::uint64_t code, int n, int c) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = static_cast<int>(code % c);
    code /= c;
  }
  return out;
}

inline double consensus_cost(const std::vector<int>& labels, int c,
                             const std::vector<MatrixXd>& frs, const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t v = 0; v < frs.size(); ++v) {
    double sq = 0.0;
    for (int i = 0; i < frs[v].rows(); ++i)
      for (int j = 0; j < c; ++j) {
        const double y = labels[i] == j ? 1.0 : 0.0;
        sq += (y - frs[v](i, j)) * (y - frs[v](i, j));
      }
    total += sq / w[v];
  }
  return total;
}

struct BruteForceResult {
  std::vector<int> labels;
  double cost = std::numeric_limits<double>::infinity();
  bool has_empty_column = false;
};

// Exhaustive minimum of sum_v ||Y - F_v R_v||^2 / w_v over all c^n labelings.
// Ties go to the first labeling met whose cost is strictly smaller.
inline BruteForceResult brute_force_consensus(const std::vector<MatrixXd>& frs,
                                              const std::vector<double>& w, int c,
                                              bool require_nonempty) {
  const int n = static_cast<int>(frs.front().rows());
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(c);
  BruteForceResult best;
  for (std::uint64_t code = 0; code < total; ++code) {
    const auto labels = decode_labels(code, n, c);
    std::vector<int> sizes(c, 0);
    for (int l : labels) ++sizes[l];
    bool empty = false;
    for (int s : sizes) empty = empty || s == 0;
    if (require_nonempty && empty) continue;
    const double cost = consensus_cost(labels, c, frs, w);
    if (cost < best.cost) {
      best.cost = cost;
      best.labels = labels;
      best.has_empty_column = empty;
    }
  }
  return best;
}

inline double weight_cost(const VectorXd& q, const VectorXd& w) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i) s += q(i) * q(i) / w(i);
  return s;
}

// Minimum of sum q_i^2 / w_i over the barycentric grid
// {(a, b, N - a - b) / N}, interior points only (the cost is infinite on
// the boundary whenever the matching q_i > 0).
inline double simplex_grid_min(const VectorXd& q, int steps) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 1; a < steps; ++a)
    for (int b = 1; a + b < steps; ++b) {
      VectorXd w(3);
      w << double(a) / steps, double(b) / steps, double(steps - a - b) / steps;
      best = std::min(best, weight_cost(q, w));
    }
  return best;
}

// Planar rotation (reflect = false) or reflection by angle theta.
inline MatrixXd planar(double theta, bool reflect) {
  MatrixXd q(2, 2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (reflect) {
    q << c, s, s, -c;
  } else {
    q << c, -s, s, c;
  }
  return q;
}

// Rand-type pair counts by visiting every pair once.
struct PairTally {
  double both = 0;       // together in truth and prediction
  double truth_only = 0;
  double pred_only = 0;
  double neither = 0;
};

inline PairTally tally_pairs(const std::vector<int>& t, const std::vector<int>& p) {
  PairTally out;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const bool st = t[i] == t[j];
      const bool sp = p[i] == p[j];
      if (st && sp) out.both += 1;
      else if (st) out.truth_only += 1;
      else if (sp) out.pred_only += 1;
      else out.neither += 1;
    }
  return out;
}

// ARI from the 2x2 pair table: (RI - E[RI]) / (max RI - E[RI]).
inline double ari_pairs(const std::vector<int>& t, const std::vector<int>& p) {
  const PairTally k = tally_pairs(t, p);
  const double pairs = k.both + k.truth_only + k.pred_only + k.neither;
  const double same_t = k.both + k.truth_only;
  const double same_p = k.both + k.pred_only;
  const double expected = same_t * same_p / pairs;
  const double max_index = 0.5 * (same_t + same_p);
  if (max_index == expected) return 1.0;
  return (k.both - expected) / (max_index - expected);
}

// Mutual information and entropies summed straight from label co-occurrence.
inline double nmi_entropy_sum(const std::vector<int>& t, const std::vector<int>& p) {
  const double n = static_cast<double>(t.size());
  std::map<int, double> ct, cp;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ct[t[i]] += 1;
    cp[p[i]] += 1;
    joint[{t[i], p[i]}] += 1;
  }
  double ht = 0, hp = 0, mi = 0;
  for (auto& [k, c] : ct) ht -= c / n * std::log(c / n);
  for (auto& [k, c] : cp) hp -= c / n * std::log(c / n);
  for (auto& [k, c] : joint) mi += c / n * std::log(c * n / (ct[k.first] * cp[k.second]));
  return mi / std::sqrt(ht * hp);
}

}  // namespace oracle
