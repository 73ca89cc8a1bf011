#include "mpac/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

namespace fs = std::filesystem;

namespace mpac {

ViewMatrix::ViewMatrix(Matrix data, int view_index)
    : data_(std::move(data)), view_index_(view_index) {
  if (view_index_ < 0) {
    throw Error(ErrorKind::InvalidInput, "view index must be non-negative");
  }
  if (data_.rows() < 1 || data_.cols() < 2) {
    throw Error(ErrorKind::ShapeMismatch,
                "view " + std::to_string(view_index_) +
                    " needs at least 1 feature and 2 samples");
  }
  if (!data_.allFinite()) {
    throw Error(ErrorKind::InvalidData,
                "view " + std::to_string(view_index_) + " has non-finite entries");
  }
}

MultiViewDataset::MultiViewDataset(std::vector<ViewMatrix> views,
                                   std::optional<std::vector<int>> labels,
                                   std::optional<int> num_clusters_hint)
    : views_(std::move(views)),
      labels_(std::move(labels)),
      num_clusters_hint_(num_clusters_hint) {
  if (views_.empty()) {
    throw Error(ErrorKind::InvalidInput, "dataset needs at least one view");
  }
  const Index n = views_.front().samples();
  for (const auto& v : views_) {
    if (v.samples() != n) {
      throw Error(ErrorKind::ShapeMismatch,
                  "view " + std::to_string(v.view_index()) + " has " +
                      std::to_string(v.samples()) + " samples, expected " +
                      std::to_string(n));
    }
  }
  if (labels_) {
    if (static_cast<Index>(labels_->size()) != n) {
      throw Error(ErrorKind::ShapeMismatch,
                  "labels length " + std::to_string(labels_->size()) +
                      " does not match sample count " + std::to_string(n));
    }
    const int k = *std::max_element(labels_->begin(), labels_->end()) + 1;
    std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)), false);
    for (int l : *labels_) {
      if (l < 0) throw Error(ErrorKind::InvalidData, "labels must be non-negative");
      seen[static_cast<std::size_t>(l)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw Error(ErrorKind::InvalidData, "labels are not dense in 0..K-1");
    }
  }
  if (num_clusters_hint_ && *num_clusters_hint_ < 1) {
    throw Error(ErrorKind::InvalidInput, "cluster hint must be positive");
  }
}

std::vector<int> densify_labels(const std::vector<std::int64_t>& raw) {
  std::map<std::int64_t, int> rank;
  for (auto l : raw) rank.emplace(l, 0);
  int next = 0;
  for (auto& [key, value] : rank) value = next++;
  std::vector<int> out;
  out.reserve(raw.size());
  for (auto l : raw) out.push_back(rank.at(l));
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

template <typename T>
T parse_number(std::string_view cell, const fs::path& path, std::size_t line_no) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) +
                                           ": not a number: '" + std::string(cell) +
                                           "'");
  }
  return value;
}

// Rows of the file become columns of the returned matrix.
Matrix read_view_csv(const fs::path& path, bool header) {
  const auto lines = read_lines(path);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = header ? 1 : 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto cell = line.substr(start, comma == std::string_view::npos
                                               ? std::string_view::npos
                                               : comma - start);
      const double value = parse_number<double>(cell, path, i + 1);
      if (!std::isfinite(value)) {
        throw Error(ErrorKind::InvalidData, path.string() + ":" +
                                                std::to_string(i + 1) +
                                                ": non-finite value");
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::ShapeMismatch,
                  path.string() + ":" + std::to_string(i + 1) + ": expected " +
                      std::to_string(rows.front().size()) + " columns, got " +
                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::ShapeMismatch, path.string() + " is empty");
  Matrix out(static_cast<Index>(rows.front().size()), static_cast<Index>(rows.size()));
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t f = 0; f < rows[s].size(); ++f) {
      out(static_cast<Index>(f), static_cast<Index>(s)) = rows[s][f];
    }
  }
  return out;
}

std::vector<std::int64_t> read_labels_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    out.push_back(parse_number<std::int64_t>(line, path, i + 1));
  }
  return out;
}

void append_double(std::string& out, double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::NotFound, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::NotFound, "failed writing " + path.string());
}

}  // namespace

MultiViewDataset load_dataset(const fs::path& dir, const IngestOptions& options) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::NotFound, "dataset directory not found: " + dir.string());
  }
  std::vector<ViewMatrix> views;
  for (int k = 0;; ++k) {
    const auto path = dir / ("view_" + std::to_string(k) + ".csv");
    if (!fs::exists(path)) break;
    Matrix data = read_view_csv(path, options.header);
    if (!views.empty() && data.cols() != views.front().samples()) {
      throw Error(ErrorKind::ShapeMismatch,
                  path.string() + " has " + std::to_string(data.cols()) +
                      " rows, view_0.csv has " +
                      std::to_string(views.front().samples()));
    }
    views.emplace_back(std::move(data), k);
  }
  if (views.empty()) {
    throw Error(ErrorKind::NotFound, "no view_0.csv in " + dir.string());
  }
  std::optional<std::vector<int>> labels;
  const auto labels_path = dir / "labels.csv";
  if (fs::exists(labels_path)) {
    auto raw = read_labels_csv(labels_path);
    if (static_cast<Index>(raw.size()) != views.front().samples()) {
      throw Error(ErrorKind::ShapeMismatch,
                  "labels.csv has " + std::to_string(raw.size()) + " entries, expected " +
                      std::to_string(views.front().samples()));
    }
    labels = densify_labels(raw);
  }
  return MultiViewDataset(std::move(views), std::move(labels));
}

void save_dataset(const fs::path& dir, const MultiViewDataset& ds) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::NotFound, "cannot create directory " + dir.string());
  }
  for (std::size_t k = 0; k < ds.num_views(); ++k) {
    const Matrix& x = ds.view(k).data();
    std::string text;
    for (Index s = 0; s < x.cols(); ++s) {
      for (Index f = 0; f < x.rows(); ++f) {
        if (f > 0) text.push_back(',');
        append_double(text, x(f, s));
      }
      text.push_back('\n');
    }
    write_text(dir / ("view_" + std::to_string(k) + ".csv"), text);
  }
  if (ds.labels()) {
    std::string text;
    for (int l : *ds.labels()) {
      text += std::to_string(l);
      text.push_back('\n');
    }
    write_text(dir / "labels.csv", text);
  }
}

MultiViewDataset normalize_views(const MultiViewDataset& ds) {
  std::vector<ViewMatrix> views;
  views.reserve(ds.num_views());
  for (const auto& view : ds.views()) {
    Matrix x = view.data();
    for (Index f = 0; f < x.rows(); ++f) {
      const double lo = x.row(f).minCoeff();
      const double hi = x.row(f).maxCoeff();
      if (hi == lo) {
        x.row(f).setZero();
        continue;
      }
      const double range = hi - lo;
      for (Index s = 0; s < x.cols(); ++s) {
        // argmax lands on exactly 2 - 1 = 1, argmin on 0 - 1 = -1
        x(f, s) = 2.0 * (x(f, s) - lo) / range - 1.0;
      }
    }
    views.emplace_back(std::move(x), view.view_index());
  }
  return MultiViewDataset(std::move(views), ds.labels(), ds.num_clusters_hint());
}

MultiViewDataset synth_multiview(int n_per_cluster, int c, int v, double noise,
                                 std::uint64_t seed) {
  if (n_per_cluster < 1 || c < 2 || v < 1 || !(noise >= 0.0)) {
    throw Error(ErrorKind::InvalidInput,
                "synth needs n_per_cluster >= 1, c >= 2, v >= 1, noise >= 0");
  }
  std::mt19937_64 rng(seed);
  const int n = n_per_cluster * c;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i / n_per_cluster;
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> extra_dims(0, 3);
  std::vector<ViewMatrix> views;
  for (int k = 0; k < v; ++k) {
    const int m = c + extra_dims(rng);
    Matrix centers(m, c);
    for (Index j = 0; j < centers.cols(); ++j) {
      for (Index f = 0; f < centers.rows(); ++f) centers(f, j) = gauss(rng);
    }
    Matrix x(m, n);
    for (int s = 0; s < n; ++s) {
      const int label = labels[static_cast<std::size_t>(s)];
      for (int f = 0; f < m; ++f) {
        x(f, s) = centers(f, label) + (noise > 0.0 ? noise * gauss(rng) : 0.0);
      }
    }
    views.emplace_back(std::move(x), k);
  }
  return MultiViewDataset(std::move(views), std::move(labels), c);
}

}  // namespace mpac
