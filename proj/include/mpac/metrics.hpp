#pragma once

#include "mpac/common.hpp"

#include <cstdint>
#include <vector>

namespace mpac::metrics {

/// counts(a, b) = #{i : true_i = a and pred_i = b}
class ContingencyTable {
public:
  ContingencyTable(Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts);

  const auto& counts() const { return counts_; }
  std::int64_t n() const { return n_; }
  std::vector<std::int64_t> row_sums() const;
  std::vector<std::int64_t> col_sums() const;
  ContingencyTable transposed() const;

private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
  std::int64_t n_;
};

ContingencyTable contingency(const std::vector<int>& true_labels,
                             const std::vector<int>& pred_labels);

struct PairCounts {
  double f_score;
  double precision;
  double recall;
};

/// Pair-counting precision/recall/F over all n(n-1)/2 sample pairs.
/// 0/0 resolves to 0.
PairCounts pairwise_metrics(const ContingencyTable& ct);

/// I(T;P) / sqrt(H(T) H(P)), natural log. A zero entropy gives 1 for
/// identical partitions and 0 otherwise.
double nmi(const ContingencyTable& ct);

/// Hubert-Arabie adjusted Rand index; 0/0 resolves to 1.
double ari(const ContingencyTable& ct);

struct MetricReport {
  double f_score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double nmi = 0.0;
  double ari = 0.0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

MetricReport evaluate(const std::vector<int>& true_labels,
                      const std::vector<int>& pred_labels);

}  // namespace mpac::metrics
