#pragma once

#include "mpac/common.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace mpac {

/// One feature representation of the samples, stored features x samples
/// (each column is a sample). Entries are finite, n >= 2, m >= 1.
class ViewMatrix {
public:
  ViewMatrix(Matrix data, int view_index);

  const Matrix& data() const { return data_; }
  int view_index() const { return view_index_; }
  Index features() const { return data_.rows(); }
  Index samples() const { return data_.cols(); }

private:
  Matrix data_;
  int view_index_;
};

/// v >= 1 views over the same n samples. Labels, when present, are dense
/// 0-based with every class in 0..K-1 occupied.
class MultiViewDataset {
public:
  MultiViewDataset(std::vector<ViewMatrix> views,
                   std::optional<std::vector<int>> labels = std::nullopt,
                   std::optional<int> num_clusters_hint = std::nullopt);

  const std::vector<ViewMatrix>& views() const { return views_; }
  const ViewMatrix& view(std::size_t i) const { return views_.at(i); }
  std::size_t num_views() const { return views_.size(); }
  Index samples() const { return views_.front().samples(); }
  const std::optional<std::vector<int>>& labels() const { return labels_; }
  std::optional<int> num_clusters_hint() const { return num_clusters_hint_; }

private:
  std::vector<ViewMatrix> views_;
  std::optional<std::vector<int>> labels_;
  std::optional<int> num_clusters_hint_;
};

struct IngestOptions {
  bool header = false;  // skip the first line of every view file
};

/// Maps arbitrary integer labels onto 0..K-1 preserving their order.
std::vector<int> densify_labels(const std::vector<std::int64_t>& raw);

/// Reads view_0.csv, view_1.csv, ... (rows = samples) and optional labels.csv.
MultiViewDataset load_dataset(const std::filesystem::path& dir,
                              const IngestOptions& options = {});

/// Writes the ingest format; values use shortest round-trip formatting.
void save_dataset(const std::filesystem::path& dir, const MultiViewDataset& ds);

/// Affine map of each feature row onto [-1, 1]; constant rows become 0.
MultiViewDataset normalize_views(const MultiViewDataset& ds);

/// c isotropic Gaussian blobs per view, shared assignment, independent
/// per-view centers and dimensionality. Deterministic in `seed`.
MultiViewDataset synth_multiview(int n_per_cluster, int c, int v, double noise,
                                 std::uint64_t seed);

}  // namespace mpac
