#pragma once

#include "mpac/alignment.hpp"
#include "mpac/common.hpp"
#include "mpac/dataset.hpp"
#include "mpac/graph.hpp"
#include "mpac/metrics.hpp"
#include "mpac/stiefel.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mpac {

enum class InitMode { Random, Spectral };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view text);

struct MpacConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  int c = 2;
  int max_outer_iters = 50;
  double rel_obj_tol = 1e-5;
  std::uint64_t seed = 0;
  InitMode init = InitMode::Spectral;
  StiefelSolverConfig stiefel;
  // Worker threads for per-view updates; 0 reads MPAC_THREADS.
  int threads = 0;
  double connectivity_tol = 1e-8;
  // Record the objective after every block update (costs one extra
  // evaluation per block).
  bool track_blocks = false;
  // Line-search the graph step between the previous graph and the closed-form
  // candidate so the clamped objective never increases. Off reproduces the
  // bare closed-form update.
  bool monotone_graph_step = true;

  void validate(Index n) const;
};

/// The four summands of the objective, each summed over views.
struct ObjectiveTerms {
  double self_expression = 0.0;  // ||X - XS||^2
  double regularizer = 0.0;      // alpha ||S||^2
  double spectral = 0.0;         // beta Tr(F^T L F)
  double alignment = 0.0;        // gamma / w ||Y - F R||^2

  double total() const { return self_expression + regularizer + spectral + alignment; }
  ObjectiveTerms& operator+=(const ObjectiveTerms& o);
};

struct ViewState {
  ViewFactorization factorization;
  SimilarityGraph graph;
  Matrix f;
  RotationMatrix r;
};

/// Objective values for one view inside a sweep; the block fields are NaN
/// unless block tracking is on.
struct ViewSweepRecord {
  double start = 0.0;
  double after_s = 0.0;
  double after_f = 0.0;
  double after_r = 0.0;
  double s_step = 1.0;  // fraction of the closed-form graph update taken
  StiefelStatus f_status = StiefelStatus::Converged;
  int f_iterations = 0;
};

struct SweepRecord {
  int sweep = 0;  // 0 is the initial state
  ObjectiveTerms terms;
  std::vector<double> weights;
  int y_changes = 0;
  std::vector<ClusterRepair> repairs;
  std::vector<ViewSweepRecord> views;
  bool blocks_tracked = false;
  double before_y = 0.0;
  double after_y = 0.0;
  double after_w = 0.0;
};

struct MpacState {
  std::vector<ViewState> views;
  IndicatorMatrix y;
  ViewWeights w;
  std::vector<SweepRecord> trace;
};

struct MpacResult {
  std::vector<int> labels;
  IndicatorMatrix y;
  ViewWeights w;
  std::vector<SweepRecord> trace;
  int iterations_run = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<ConnectivityReport> connectivity;
};

struct RunObserver {
  std::function<void(const MpacState&, const SweepRecord&)> on_sweep;
};

/// Builds factorizations and the starting point: R_i = I, w_i = 1/v, and
/// either random (Y, F_i) or spectral embeddings of the beta = 0 graphs.
MpacState initialize(const MultiViewDataset& ds, const MpacConfig& cfg);

struct GraphStep {
  SimilarityGraph graph;
  double step = 1.0;
};

/// Graph update for one view given its new embedding f. The closed-form
/// update_s result S* is taken whole when monotone_graph_step is off;
/// otherwise S = S_prev + t (S* - S_prev) with t in [0, 1] minimizing
///   ||X - XS||^2 + alpha ||S||^2 + beta Tr(F^T L(S) F),
/// which is convex piecewise-quadratic in t.
GraphStep graph_step(const ViewState& view, const ViewMatrix& x, const Matrix& f,
                     const MpacConfig& cfg);

ObjectiveTerms view_objective(const ViewState& view, const ViewMatrix& x,
                              const Matrix& y_dense, double weight,
                              const MpacConfig& cfg);

ObjectiveTerms evaluate_objective(const MpacState& state, const MultiViewDataset& ds,
                                  const MpacConfig& cfg);

/// Discrete labels from an embedding: rows normalized, an initial rotation
/// picked from mutually near-orthogonal rows, then alternating argmax and
/// Procrustes until the assignment settles.
IndicatorMatrix discretize_embedding(const Matrix& f, std::uint64_t seed);

/// Alternating minimization: per view S, F, R; then Y; then w.
MpacResult run(const MultiViewDataset& ds, const MpacConfig& cfg,
               const RunObserver& observer = {});

struct GridCell {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  std::optional<metrics::MetricReport> metrics;
  double objective = 0.0;
  int iterations = 0;
};

/// One run per (alpha, beta, gamma), alpha outermost. Failed cells keep
/// their error text and the sweep continues.
std::vector<GridCell> grid_sweep(const MultiViewDataset& ds, const MpacConfig& base,
                                 const std::vector<double>& alphas,
                                 const std::vector<double>& betas,
                                 const std::vector<double>& gammas);

}  // namespace mpac
