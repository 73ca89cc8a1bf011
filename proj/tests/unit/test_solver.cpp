#include "mpac/solver.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace mpac;

namespace {

MultiViewDataset synth(int per, int c, int v, double noise, std::uint64_t seed) {
  return normalize_views(synth_multiview(per, c, v, noise, seed));
}

MpacConfig config(int c) {
  MpacConfig cfg;
  cfg.c = c;
  cfg.threads = 1;
  return cfg;
}

// Sum of the four terms straight from their definitions.
double recompute(const MpacState& st, const MultiViewDataset& ds, const MpacConfig& cfg) {
  const Matrix y = st.y.dense();
  double total = 0.0;
  for (std::size_t i = 0; i < ds.num_views(); ++i) {
    const Matrix& x = ds.view(i).data();
    const auto& v = st.views[i];
    const Matrix& w = v.graph.w_sym;
    double spec = 0.0;
    for (Index a = 0; a < w.rows(); ++a)
      for (Index b = 0; b < w.cols(); ++b)
        spec += 0.5 * w(a, b) * (v.f.row(a) - v.f.row(b)).squaredNorm();
    total += (x - x * v.graph.s).squaredNorm() + cfg.alpha * v.graph.s.squaredNorm() +
             cfg.beta * spec +
             cfg.gamma / st.w[i] * (y - v.f * v.r.matrix()).squaredNorm();
  }
  return total;
}

}  // namespace

TEST_CASE("config validation") {
  MpacConfig cfg = config(3);
  CHECK_NOTHROW(cfg.validate(10));
  CHECK_THROWS_AS(cfg.validate(2), Error);
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(10), Error);
  cfg = config(1);
  CHECK_THROWS_AS(cfg.validate(10), Error);
  CHECK(parse_init_mode("random") == InitMode::Random);
  CHECK_THROWS_AS(parse_init_mode("kmeans"), Error);
}

TEST_CASE("initial state") {
  const auto ds = synth(10, 3, 2, 0.1, 1);
  for (InitMode mode : {InitMode::Random, InitMode::Spectral}) {
    MpacConfig cfg = config(3);
    cfg.init = mode;
    cfg.seed = 9;
    const auto a = initialize(ds, cfg);
    const auto b = initialize(ds, cfg);
    CHECK(a.y == b.y);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(a.views[i].f == b.views[i].f);
      CHECK(orthonormality_defect(a.views[i].f) <= 1e-10);
      CHECK(a.views[i].r.matrix() == Matrix::Identity(3, 3));
      CHECK(a.w[i] == 0.5);
    }
  }
}

TEST_CASE("spectral init separates well-separated blobs") {
  const auto ds = synth(20, 3, 2, 0.01, 4);
  const auto st = initialize(ds, config(3));
  CHECK(metrics::evaluate(*ds.labels(), st.y.assignment()).ari == 1.0);
}

TEST_CASE("objective reductions") {
  const auto ds = synth(6, 2, 2, 0.2, 2);
  MpacConfig cfg = config(2);
  cfg.beta = 0.0;
  cfg.gamma = 0.0;
  auto st = initialize(ds, cfg);
  double expect = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    st.views[i].graph = make_graph(Matrix::Zero(12, 12));
    expect += ds.view(i).data().squaredNorm();
  }
  CHECK(evaluate_objective(st, ds, cfg).total() == doctest::Approx(expect).epsilon(1e-14));

  // gamma = 0 decouples Y, R and w.
  cfg = config(2);
  cfg.gamma = 0.0;
  auto st2 = initialize(ds, cfg);
  const double before = evaluate_objective(st2, ds, cfg).total();
  std::mt19937_64 rng(3);
  st2.y = IndicatorMatrix(std::vector<int>{0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1}, 2);
  st2.views[0].r = RotationMatrix(oracle::random_orthonormal(2, 2, rng));
  Vector w(2);
  w << 0.2, 0.8;
  st2.w = ViewWeights(w);
  CHECK(evaluate_objective(st2, ds, cfg).total() == before);
}

TEST_CASE("objective matches a term-by-term recomputation") {
  const auto ds = synth(5, 3, 3, 0.3, 5);
  MpacConfig cfg = config(3);
  cfg.alpha = 0.7;
  cfg.beta = 1.3;
  cfg.gamma = 2.1;
  auto st = initialize(ds, cfg);
  std::mt19937_64 rng(6);
  for (auto& v : st.views) {
    Matrix s = oracle::gaussian(15, 15, rng);
    v.graph = make_graph(s);
    v.f = oracle::random_orthonormal(15, 3, rng);
    v.r = RotationMatrix(oracle::random_orthonormal(3, 3, rng));
  }
  Vector w(3);
  w << 0.5, 0.3, 0.2;
  st.w = ViewWeights(w);
  const double ours = evaluate_objective(st, ds, cfg).total();
  CHECK(std::abs(ours - recompute(st, ds, cfg)) <= 1e-10 * std::abs(ours));
}

TEST_CASE("run is monotone block by block") {
  const auto ds = synth(30, 3, 3, 0.1, 7);
  MpacConfig cfg = config(3);
  cfg.track_blocks = true;
  const auto res = run(ds, cfg);
  const auto leq = [](double a, double b) { return a <= b + 1e-8 * std::abs(b); };
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    const auto& rec = res.trace[k];
    CHECK(leq(rec.terms.total(), res.trace[k - 1].terms.total()));
    for (const auto& v : rec.views) {
      CHECK(leq(v.after_s, v.start));
      CHECK(leq(v.after_f, v.after_s));
      CHECK(leq(v.after_r, v.after_f));
    }
    CHECK(leq(rec.after_y, rec.before_y));
    CHECK(leq(rec.after_w, rec.after_y));
  }
  CHECK(res.labels.size() == 90);
  CHECK(res.connectivity.size() == 3);
}

TEST_CASE("single view keeps weight one") {
  const auto ds = synth(15, 3, 1, 0.05, 8);
  const auto res = run(ds, config(3));
  for (const auto& rec : res.trace) CHECK(rec.weights == std::vector<double>{1.0});
  CHECK(res.w[0] == 1.0);
}

TEST_CASE("labels agree with y and come from the last scores when gamma dominates") {
  const auto ds = synth(10, 3, 2, 0.2, 9);
  MpacConfig cfg = config(3);
  cfg.gamma = 1e6;
  cfg.max_outer_iters = 3;
  MpacState last = initialize(ds, cfg);
  MpacState prev = last;
  RunObserver obs;
  obs.on_sweep = [&](const MpacState& st, const SweepRecord&) {
    prev = last;
    last.views = st.views;
    last.y = st.y;
    last.w = st.w;
  };
  const auto res = run(ds, cfg, obs);
  CHECK(res.y.assignment() == res.labels);
  std::vector<Matrix> fs;
  std::vector<RotationMatrix> rs;
  for (const auto& v : last.views) {
    fs.push_back(v.f);
    rs.push_back(v.r);
  }
  // Y is computed before w changes, so the weights of the previous sweep apply.
  CHECK(update_indicator(fs, rs, prev.w).y.assignment() == res.labels);
}

TEST_CASE("permuting samples permutes the partition") {
  const auto ds = synth(12, 3, 2, 0.05, 10);
  std::vector<int> perm(ds.samples());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(11);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<ViewMatrix> views;
  for (std::size_t v = 0; v < ds.num_views(); ++v) {
    const Matrix& x = ds.view(v).data();
    Matrix px(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) px.col(j) = x.col(perm[j]);
    views.emplace_back(px, static_cast<int>(v));
  }
  const MultiViewDataset pds(views);
  const auto a = run(ds, config(3));
  const auto b = run(pds, config(3));
  std::vector<int> back(a.labels.size());
  for (std::size_t j = 0; j < perm.size(); ++j) back[perm[j]] = b.labels[j];
  CHECK(metrics::evaluate(a.labels, back).ari == 1.0);
}

TEST_CASE("threads do not change the result") {
  const auto ds = synth(15, 3, 3, 0.2, 12);
  MpacConfig one = config(3);
  MpacConfig four = config(3);
  four.threads = 4;
  const auto a = run(ds, one);
  const auto b = run(ds, four);
  CHECK(a.labels == b.labels);
  CHECK(a.trace.back().terms.total() == b.trace.back().terms.total());
}

TEST_CASE("grid sweep bookkeeping") {
  const auto ds = synth(8, 2, 2, 0.1, 13);
  const auto cells = grid_sweep(ds, config(2), {0.5, 1.0}, {0.5, 1.0}, {0.1, 1.0});
  REQUIRE(cells.size() == 8);
  CHECK(cells[0].alpha == 0.5);
  CHECK(cells[7].gamma == 1.0);
  for (const auto& c : cells) {
    CHECK(c.ok);
    CHECK(std::isfinite(c.objective));
    CHECK(c.metrics.has_value());
  }
  const auto single = grid_sweep(ds, config(2), {1.0}, {1.0}, {1.0});
  const auto direct = run(ds, config(2));
  REQUIRE(single.size() == 1);
  CHECK(single[0].iterations == direct.iterations_run);
  CHECK(single[0].objective == direct.trace.back().terms.total());

  const auto bad = grid_sweep(ds, config(2), {-1.0, 1.0}, {1.0}, {1.0});
  CHECK_FALSE(bad[0].ok);
  CHECK_FALSE(bad[0].error.empty());
  CHECK(bad[1].ok);
}
