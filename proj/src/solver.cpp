#include "mpac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mpac {

std::string_view to_string(InitMode mode) {
  return mode == InitMode::Random ? "random" : "spectral";
}

InitMode parse_init_mode(std::string_view text) {
  if (text == "random") return InitMode::Random;
  if (text == "spectral") return InitMode::Spectral;
  throw Error(ErrorKind::InvalidInput, "unknown init mode '" + std::string(text) + "'");
}

void MpacConfig::validate(Index n) const {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidInput, "alpha must be positive");
  if (!(beta >= 0.0)) throw Error(ErrorKind::InvalidInput, "beta must be non-negative");
  if (!(gamma >= 0.0)) throw Error(ErrorKind::InvalidInput, "gamma must be non-negative");
  if (c < 2 || c > n) {
    throw Error(ErrorKind::InvalidInput,
                "cluster count must lie in 2..n (n = " + std::to_string(n) + ")");
  }
  if (max_outer_iters < 1) throw Error(ErrorKind::InvalidInput, "max_outer_iters must be >= 1");
  if (!(rel_obj_tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "rel_obj_tol must be >= 0");
  if (threads < 0) throw Error(ErrorKind::InvalidInput, "threads must be >= 0");
  stiefel.validate();
}

ObjectiveTerms& ObjectiveTerms::operator+=(const ObjectiveTerms& o) {
  self_expression += o.self_expression;
  regularizer += o.regularizer;
  spectral += o.spectral;
  alignment += o.alignment;
  return *this;
}

namespace {

constexpr int kDiscretizeIters = 100;

int worker_count(const MpacConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : threads_from_env();
}

Matrix random_orthonormal(Index n, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(n, c);
}

Matrix bottom_eigenvectors(const Matrix& laplacian, Index c) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(laplacian);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericalError, "Laplacian eigensolver did not converge");
  }
  return eig.eigenvectors().leftCols(c);
}

double view_total(const ViewState& view, const ViewMatrix& x, const Matrix& y_dense,
                  double weight, const MpacConfig& cfg) {
  return view_objective(view, x, y_dense, weight, cfg).total();
}

double graph_block(const SimilarityGraph& g, const Matrix& x, const Matrix& f,
                   const MpacConfig& cfg) {
  return (x - x * g.s).squaredNorm() + cfg.alpha * g.s.squaredNorm() +
         cfg.beta * spectral_energy(g.laplacian, f);
}

}  // namespace

GraphStep graph_step(const ViewState& view, const ViewMatrix& x, const Matrix& f,
                     const MpacConfig& cfg) {
  SimilarityGraph candidate = update_s(view.factorization, f, cfg.beta);
  if (!cfg.monotone_graph_step) return GraphStep{std::move(candidate), 1.0};

  const Matrix& data = x.data();
  const Matrix& s0 = view.graph.s;
  const Matrix d = candidate.s - s0;
  const Matrix residual = data * s0 - data;
  const Matrix xd = data * d;
  const double q0 = residual.squaredNorm() + cfg.alpha * s0.squaredNorm();
  const double q1 = 2.0 * (residual.cwiseProduct(xd).sum() + cfg.alpha * s0.cwiseProduct(d).sum());
  const double q2 = xd.squaredNorm() + cfg.alpha * d.squaredNorm();

  // Tr(F^T L F) = sum_{i<j} h_ij max(0, sym(S)_ij)
  const Matrix h = embedding_distances(f);
  const Index n = s0.rows();
  std::vector<double> base;
  std::vector<double> slope;
  std::vector<double> weight;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (h(i, j) == 0.0) continue;
      base.push_back(0.5 * (s0(i, j) + s0(j, i)));
      slope.push_back(0.5 * (d(i, j) + d(j, i)));
      weight.push_back(h(i, j));
    }
  }
  auto phi = [&](double t) {
    double spectral = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      spectral += weight[k] * std::max(0.0, base[k] + t * slope[k]);
    }
    return q0 + t * (q1 + t * q2) + cfg.beta * spectral;
  };

  double best_t = 1.0;
  double best = phi(1.0);
  if (const double at0 = phi(0.0); at0 < best) {
    best = at0;
    best_t = 0.0;
  }
  if (best_t == 0.0) {
    // golden-section search; phi is convex on [0, 1]
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0;
    double hi = 1.0;
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = phi(a);
    double fb = phi(b);
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - ratio * (hi - lo);
        fa = phi(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + ratio * (hi - lo);
        fb = phi(b);
      }
    }
    const double t = fa <= fb ? a : b;
    if (std::min(fa, fb) < best) best_t = t;
  }

  if (best_t == 1.0) {
    if (graph_block(candidate, data, f, cfg) <= graph_block(view.graph, data, f, cfg)) {
      return GraphStep{std::move(candidate), 1.0};
    }
    return GraphStep{view.graph, 0.0};
  }
  if (best_t == 0.0) return GraphStep{view.graph, 0.0};
  SimilarityGraph mixed = make_graph(s0 + best_t * d);
  if (graph_block(mixed, data, f, cfg) > graph_block(view.graph, data, f, cfg)) {
    return GraphStep{view.graph, 0.0};
  }
  return GraphStep{std::move(mixed), best_t};
}

ObjectiveTerms view_objective(const ViewState& view, const ViewMatrix& x,
                              const Matrix& y_dense, double weight,
                              const MpacConfig& cfg) {
  ObjectiveTerms t;
  const Matrix& data = x.data();
  t.self_expression = (data - data * view.graph.s).squaredNorm();
  t.regularizer = cfg.alpha * view.graph.s.squaredNorm();
  t.spectral = cfg.beta * spectral_energy(view.graph.laplacian, view.f);
  t.alignment = cfg.gamma / weight * (y_dense - view.f * view.r.matrix()).squaredNorm();
  return t;
}

ObjectiveTerms evaluate_objective(const MpacState& state, const MultiViewDataset& ds,
                                  const MpacConfig& cfg) {
  if (state.views.size() != ds.num_views()) {
    throw Error(ErrorKind::ShapeMismatch, "state and dataset differ in view count");
  }
  const Matrix y = state.y.dense();
  ObjectiveTerms total;
  for (std::size_t i = 0; i < state.views.size(); ++i) {
    total += view_objective(state.views[i], ds.view(i), y, state.w[i], cfg);
  }
  return total;
}

IndicatorMatrix discretize_embedding(const Matrix& f, std::uint64_t seed) {
  const Index n = f.rows();
  const Index c = f.cols();
  Matrix rows = f;
  for (Index i = 0; i < n; ++i) {
    const double norm = rows.row(i).norm();
    if (norm > 0.0) rows.row(i) /= norm;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Matrix r(c, c);
  r.col(0) = rows.row(pick(rng)).transpose();
  Vector overlap = Vector::Zero(n);
  for (Index k = 1; k < c; ++k) {
    overlap += (rows * r.col(k - 1)).cwiseAbs();
    Index next = 0;
    overlap.minCoeff(&next);
    r.col(k) = rows.row(next).transpose();
  }

  IndicatorMatrix y = indicator_from_scores(rows * r).y;
  for (int it = 0; it < kDiscretizeIters; ++it) {
    const RotationMatrix rot = update_rotation(rows, y);
    IndicatorMatrix next = indicator_from_scores(rows * rot.matrix()).y;
    if (next == y) break;
    y = std::move(next);
  }
  return y;
}

MpacState initialize(const MultiViewDataset& ds, const MpacConfig& cfg) {
  const Index n = ds.samples();
  cfg.validate(n);
  const std::size_t v = ds.num_views();
  std::mt19937_64 rng(cfg.seed);

  std::vector<ViewState> views;
  views.reserve(v);
  for (std::size_t i = 0; i < v; ++i) {
    try {
      ViewFactorization fact = build_factorization(ds.view(i), cfg.alpha);
      SimilarityGraph graph = make_graph(fact.solve(fact.gram()));
      Matrix f = cfg.init == InitMode::Spectral
                     ? bottom_eigenvectors(graph.laplacian, cfg.c)
                     : random_orthonormal(n, cfg.c, rng);
      views.push_back(ViewState{std::move(fact), std::move(graph), std::move(f),
                                RotationMatrix::identity(cfg.c)});
    } catch (const Error& e) {
      throw e.with_context("initialize, view " + std::to_string(i));
    }
  }

  std::optional<IndicatorMatrix> y;
  if (cfg.init == InitMode::Spectral) {
    y = discretize_embedding(views.front().f, cfg.seed);
  } else {
    std::uniform_int_distribution<int> column(0, cfg.c - 1);
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (auto& a : assignment) a = column(rng);
    y = IndicatorMatrix(std::move(assignment), cfg.c);
  }

  MpacState state{std::move(views), std::move(*y), ViewWeights::uniform(v), {}};
  SweepRecord initial;
  initial.terms = evaluate_objective(state, ds, cfg);
  initial.weights.assign(state.w.values().data(), state.w.values().data() + v);
  state.trace.push_back(std::move(initial));
  return state;
}

MpacResult run(const MultiViewDataset& ds, const MpacConfig& cfg, const RunObserver& observer) {
  MpacState state = initialize(ds, cfg);
  const std::size_t v = ds.num_views();
  const int threads = worker_count(cfg);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  MpacResult result{{}, state.y, state.w, {}, 0, false, "max_iterations", {}};
  int stable_sweeps = 0;
  for (int sweep = 1; sweep <= cfg.max_outer_iters; ++sweep) {
    SweepRecord rec;
    rec.sweep = sweep;
    rec.blocks_tracked = cfg.track_blocks;
    rec.views.resize(v);

    const Matrix y_dense = state.y.dense();
    parallel_for(v, threads, [&](std::size_t i) {
      ViewState& view = state.views[i];
      ViewSweepRecord& vr = rec.views[i];
      const ViewMatrix& x = ds.view(i);
      const double weight = state.w[i];
      try {
        vr.start = cfg.track_blocks ? view_total(view, x, y_dense, weight, cfg) : nan;

        GraphStep gs = graph_step(view, x, view.f, cfg);
        view.graph = std::move(gs.graph);
        vr.s_step = gs.step;
        vr.after_s = cfg.track_blocks ? view_total(view, x, y_dense, weight, cfg) : nan;

        StiefelProblem problem(cfg.beta * view.graph.laplacian,
                               (cfg.gamma / weight) * y_dense * view.r.matrix().transpose());
        StiefelResult fres = solve_stiefel(problem, view.f, cfg.stiefel);
        view.f = std::move(fres.f);
        vr.f_status = fres.status;
        vr.f_iterations = fres.iterations;
        vr.after_f = cfg.track_blocks ? view_total(view, x, y_dense, weight, cfg) : nan;

        view.r = update_rotation(view.f, state.y);
        vr.after_r = cfg.track_blocks ? view_total(view, x, y_dense, weight, cfg) : nan;
      } catch (const Error& e) {
        throw e.with_context("sweep " + std::to_string(sweep) + ", view " + std::to_string(i));
      }
    });

    try {
      if (cfg.track_blocks) rec.before_y = evaluate_objective(state, ds, cfg).total();

      std::vector<Matrix> fs;
      std::vector<RotationMatrix> rs;
      for (const auto& view : state.views) {
        fs.push_back(view.f);
        rs.push_back(view.r);
      }
      IndicatorUpdate upd = update_indicator(fs, rs, state.w);
      for (std::size_t i = 0; i < upd.y.assignment().size(); ++i) {
        if (upd.y.assignment()[i] != state.y.assignment()[i]) ++rec.y_changes;
      }
      rec.repairs = std::move(upd.repairs);
      state.y = std::move(upd.y);
      if (cfg.track_blocks) rec.after_y = evaluate_objective(state, ds, cfg).total();

      Vector q(static_cast<Index>(v));
      for (std::size_t i = 0; i < v; ++i) {
        q(static_cast<Index>(i)) = alignment_residual(state.views[i].f, state.views[i].r, state.y);
      }
      state.w = update_weights(q);
    } catch (const Error& e) {
      throw e.with_context("sweep " + std::to_string(sweep));
    }

    rec.terms = evaluate_objective(state, ds, cfg);
    rec.after_w = cfg.track_blocks ? rec.terms.total() : nan;
    if (!cfg.track_blocks) rec.before_y = rec.after_y = nan;
    rec.weights.assign(state.w.values().data(), state.w.values().data() + v);
    state.trace.push_back(rec);
    if (observer.on_sweep) observer.on_sweep(state, state.trace.back());
    result.iterations_run = sweep;

    const double prev = state.trace[state.trace.size() - 2].terms.total();
    const double cur = rec.terms.total();
    const double rel_decrease = (prev - cur) / std::max(std::abs(prev), 1e-300);
    stable_sweeps = rec.y_changes == 0 ? stable_sweeps + 1 : 0;
    if (rel_decrease < cfg.rel_obj_tol) {
      result.converged = true;
      result.stop_reason = "objective";
      break;
    }
    if (stable_sweeps >= 2) {
      result.converged = true;
      result.stop_reason = "assignment";
      break;
    }
  }

  result.labels = state.y.assignment();
  result.y = state.y;
  result.w = state.w;
  for (std::size_t i = 0; i < v; ++i) {
    try {
      result.connectivity.push_back(
          connectivity_defect(state.views[i].graph.laplacian, cfg.c, cfg.connectivity_tol));
    } catch (const Error& e) {
      throw e.with_context("connectivity, view " + std::to_string(i));
    }
  }
  result.trace = std::move(state.trace);
  return result;
}

std::vector<GridCell> grid_sweep(const MultiViewDataset& ds, const MpacConfig& base,
                                 const std::vector<double>& alphas,
                                 const std::vector<double>& betas,
                                 const std::vector<double>& gammas) {
  if (alphas.empty() || betas.empty() || gammas.empty()) {
    throw Error(ErrorKind::InvalidInput, "parameter grids must be non-empty");
  }
  std::vector<GridCell> cells;
  for (double a : alphas) {
    for (double b : betas) {
      for (double g : gammas) {
        GridCell cell;
        cell.alpha = a;
        cell.beta = b;
        cell.gamma = g;
        cells.push_back(std::move(cell));
      }
    }
  }
  const int threads = worker_count(base);
  parallel_for(cells.size(), threads, [&](std::size_t k) {
    GridCell& cell = cells[k];
    MpacConfig cfg = base;
    cfg.alpha = cell.alpha;
    cfg.beta = cell.beta;
    cfg.gamma = cell.gamma;
    cfg.threads = 1;
    try {
      const MpacResult res = run(ds, cfg);
      cell.ok = true;
      cell.objective = res.trace.back().terms.total();
      cell.iterations = res.iterations_run;
      if (ds.labels()) cell.metrics = metrics::evaluate(*ds.labels(), res.labels);
    } catch (const Error& e) {
      cell.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
  });
  return cells;
}

}  // namespace mpac
