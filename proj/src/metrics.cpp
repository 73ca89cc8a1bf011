#include "mpac/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mpac::metrics {

namespace {

using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

std::int64_t comb2(std::int64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }

// Sum of -p log p over the non-zero counts, accumulated in sorted order so
// relabeled partitions produce bit-identical entropies.
double entropy(std::vector<std::int64_t> counts, double n) {
  std::erase(counts, 0);
  std::sort(counts.begin(), counts.end());
  double h = 0.0;
  for (auto k : counts) {
    const double p = static_cast<double>(k) / n;
    h -= p * std::log(p);
  }
  return h;
}

bool is_bijection(const Counts& counts) {
  for (Index i = 0; i < counts.rows(); ++i) {
    if ((counts.row(i).array() > 0).count() > 1) return false;
  }
  for (Index j = 0; j < counts.cols(); ++j) {
    if ((counts.col(j).array() > 0).count() > 1) return false;
  }
  return true;
}

}  // namespace

ContingencyTable::ContingencyTable(Counts counts)
    : counts_(std::move(counts)), n_(counts_.sum()) {
  if ((counts_.array() < 0).any()) {
    throw Error(ErrorKind::InvalidInput, "contingency counts must be non-negative");
  }
}

std::vector<std::int64_t> ContingencyTable::row_sums() const {
  std::vector<std::int64_t> out(static_cast<std::size_t>(counts_.rows()));
  for (Index i = 0; i < counts_.rows(); ++i) out[static_cast<std::size_t>(i)] = counts_.row(i).sum();
  return out;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
  std::vector<std::int64_t> out(static_cast<std::size_t>(counts_.cols()));
  for (Index j = 0; j < counts_.cols(); ++j) out[static_cast<std::size_t>(j)] = counts_.col(j).sum();
  return out;
}

ContingencyTable ContingencyTable::transposed() const {
  return ContingencyTable(counts_.transpose());
}

ContingencyTable contingency(const std::vector<int>& true_labels,
                             const std::vector<int>& pred_labels) {
  if (true_labels.size() != pred_labels.size()) {
    throw Error(ErrorKind::ShapeMismatch, "label vectors differ in length");
  }
  int kt = 0;
  int kp = 0;
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    if (true_labels[i] < 0 || pred_labels[i] < 0) {
      throw Error(ErrorKind::InvalidInput, "labels must be non-negative");
    }
    kt = std::max(kt, true_labels[i] + 1);
    kp = std::max(kp, pred_labels[i] + 1);
  }
  Counts counts = Counts::Zero(kt, kp);
  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    ++counts(true_labels[i], pred_labels[i]);
  }
  return ContingencyTable(std::move(counts));
}

PairCounts pairwise_metrics(const ContingencyTable& ct) {
  if (ct.n() < 2) throw Error(ErrorKind::InvalidInput, "pair counting needs n >= 2");
  std::int64_t together_both = 0;
  for (Index i = 0; i < ct.counts().rows(); ++i) {
    for (Index j = 0; j < ct.counts().cols(); ++j) together_both += comb2(ct.counts()(i, j));
  }
  std::int64_t together_pred = 0;
  for (auto b : ct.col_sums()) together_pred += comb2(b);
  std::int64_t together_true = 0;
  for (auto a : ct.row_sums()) together_true += comb2(a);

  const double tp = static_cast<double>(together_both);
  const double precision = together_pred == 0 ? 0.0 : tp / static_cast<double>(together_pred);
  const double recall = together_true == 0 ? 0.0 : tp / static_cast<double>(together_true);
  const double f = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
  return PairCounts{f, precision, recall};
}

double nmi(const ContingencyTable& ct) {
  const double n = static_cast<double>(ct.n());
  if (ct.n() == 0) return 1.0;
  const double ht = entropy(ct.row_sums(), n);
  const double hp = entropy(ct.col_sums(), n);
  if (ht == 0.0 || hp == 0.0) return is_bijection(ct.counts()) ? 1.0 : 0.0;
  const auto& c = ct.counts();
  const double hjoint = entropy(std::vector<std::int64_t>(c.data(), c.data() + c.size()), n);
  const double mi = ht + hp - hjoint;
  return std::clamp(mi / std::sqrt(ht * hp), 0.0, 1.0);
}

double ari(const ContingencyTable& ct) {
  std::int64_t index = 0;
  for (Index i = 0; i < ct.counts().rows(); ++i) {
    for (Index j = 0; j < ct.counts().cols(); ++j) index += comb2(ct.counts()(i, j));
  }
  std::int64_t sum_a = 0;
  for (auto a : ct.row_sums()) sum_a += comb2(a);
  std::int64_t sum_b = 0;
  for (auto b : ct.col_sums()) sum_b += comb2(b);
  const std::int64_t pairs = comb2(ct.n());
  if (pairs == 0) return 1.0;

  const double expected =
      static_cast<double>(sum_a) * static_cast<double>(sum_b) / static_cast<double>(pairs);
  const double max_index = 0.5 * static_cast<double>(sum_a + sum_b);
  const double num = static_cast<double>(index) - expected;
  const double den = max_index - expected;
  if (den == 0.0) return 1.0;
  return num / den;
}

MetricReport evaluate(const std::vector<int>& true_labels,
                      const std::vector<int>& pred_labels) {
  const auto ct = contingency(true_labels, pred_labels);
  const auto pc = pairwise_metrics(ct);
  return MetricReport{pc.f_score, pc.precision, pc.recall, nmi(ct), ari(ct)};
}

}  // namespace mpac::metrics
