#include "mpac/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace mpac::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return kUsage;
    case ErrorKind::NotFound:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::ParseError:
    case ErrorKind::InvalidData: return kDataError;
    case ErrorKind::NumericalError: return kNumericalError;
  }
  return kNumericalError;
}

RunReport make_report(const ConfigEcho& echo, const MpacResult& result,
                      const std::optional<std::vector<int>>& truth, double wall_seconds) {
  RunReport r;
  r.config = echo;
  r.labels = result.labels;
  r.weights.assign(result.w.values().data(), result.w.values().data() + result.w.size());
  r.iterations = result.iterations_run;
  r.converged = result.converged;
  r.stop_reason = result.stop_reason;
  for (const auto& rec : result.trace) {
    r.objective_trace.push_back(TraceEntry{rec.sweep, rec.terms.self_expression,
                                           rec.terms.regularizer, rec.terms.spectral,
                                           rec.terms.alignment, rec.terms.total()});
  }
  if (truth) r.metrics = metrics::evaluate(*truth, result.labels);
  for (std::size_t i = 0; i < result.connectivity.size(); ++i) {
    const auto& c = result.connectivity[i];
    r.connectivity.push_back(ConnectivityEntry{
        static_cast<int>(i), c.count,
        std::vector<double>(c.eigenvalues.data(), c.eigenvalues.data() + c.eigenvalues.size())});
  }
  r.wall_seconds = wall_seconds;
  return r;
}

json to_json(const RunReport& r) {
  json j;
  j["config"] = {{"data", r.config.data},         {"clusters", r.config.clusters},
                 {"alpha", r.config.alpha},       {"beta", r.config.beta},
                 {"gamma", r.config.gamma},       {"seed", r.config.seed},
                 {"init", r.config.init},         {"max_iter", r.config.max_iter},
                 {"tol", r.config.tol},           {"normalize", r.config.normalize},
                 {"header", r.config.header}};
  j["labels"] = r.labels;
  j["weights"] = r.weights;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["stop_reason"] = r.stop_reason;
  j["objective_trace"] = json::array();
  for (const auto& t : r.objective_trace) {
    j["objective_trace"].push_back({{"sweep", t.sweep},
                                    {"self_expression", t.self_expression},
                                    {"regularizer", t.regularizer},
                                    {"spectral", t.spectral},
                                    {"alignment", t.alignment},
                                    {"total", t.total}});
  }
  if (r.metrics) {
    j["metrics"] = {{"f_score", r.metrics->f_score}, {"precision", r.metrics->precision},
                    {"recall", r.metrics->recall},   {"nmi", r.metrics->nmi},
                    {"ari", r.metrics->ari}};
  }
  j["connectivity"] = json::array();
  for (const auto& c : r.connectivity) {
    j["connectivity"].push_back({{"view", c.view},
                                 {"zero_eigenvalues", c.zero_eigenvalues},
                                 {"eigenvalues", c.eigenvalues}});
  }
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  const auto& c = j.at("config");
  r.config.data = c.at("data").get<std::string>();
  r.config.clusters = c.at("clusters").get<int>();
  r.config.alpha = c.at("alpha").get<double>();
  r.config.beta = c.at("beta").get<double>();
  r.config.gamma = c.at("gamma").get<double>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  r.config.init = c.at("init").get<std::string>();
  r.config.max_iter = c.at("max_iter").get<int>();
  r.config.tol = c.at("tol").get<double>();
  r.config.normalize = c.at("normalize").get<bool>();
  r.config.header = c.at("header").get<bool>();
  r.labels = j.at("labels").get<std::vector<int>>();
  r.weights = j.at("weights").get<std::vector<double>>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.stop_reason = j.at("stop_reason").get<std::string>();
  for (const auto& t : j.at("objective_trace")) {
    r.objective_trace.push_back(TraceEntry{
        t.at("sweep").get<int>(), t.at("self_expression").get<double>(),
        t.at("regularizer").get<double>(), t.at("spectral").get<double>(),
        t.at("alignment").get<double>(), t.at("total").get<double>()});
  }
  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    r.metrics = metrics::MetricReport{m.at("f_score").get<double>(), m.at("precision").get<double>(),
                                      m.at("recall").get<double>(), m.at("nmi").get<double>(),
                                      m.at("ari").get<double>()};
  }
  for (const auto& e : j.at("connectivity")) {
    r.connectivity.push_back(ConnectivityEntry{e.at("view").get<int>(),
                                               e.at("zero_eigenvalues").get<int>(),
                                               e.at("eigenvalues").get<std::vector<double>>()});
  }
  r.wall_seconds = j.at("wall_seconds").get<double>();
  return r;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) {
      throw Error(ErrorKind::InvalidInput, "empty entry in grid '" + text + "'");
    }
    const std::string_view cell(item.data() + first, last - first + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw Error(ErrorKind::InvalidInput, "bad grid value '" + std::string(cell) + "'");
    }
    out.push_back(value);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidInput, "grid '" + text + "' is empty");
  return out;
}

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::NotFound, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::NotFound, "failed writing " + path.string());
}

std::string matrix_csv(const Matrix& m) {
  std::string text;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) text.push_back(',');
      text += format_double(m(i, j));
    }
    text.push_back('\n');
  }
  return text;
}

json sweep_line(const SweepRecord& rec) {
  json j = {{"sweep", rec.sweep},
            {"self_expression", rec.terms.self_expression},
            {"regularizer", rec.terms.regularizer},
            {"spectral", rec.terms.spectral},
            {"alignment", rec.terms.alignment},
            {"total", rec.terms.total()},
            {"weights", rec.weights},
            {"y_changes", rec.y_changes},
            {"repairs", rec.repairs.size()}};
  j["views"] = json::array();
  for (const auto& v : rec.views) {
    j["views"].push_back({{"graph_step", v.s_step},
                          {"embedding_status", std::string(to_string(v.f_status))},
                          {"embedding_iterations", v.f_iterations}});
  }
  return j;
}

// Options shared by `run` and `sweep`.
struct SolveOptions {
  std::string data;
  int clusters = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::string init = "spectral";
  int max_iter = 50;
  double tol = 1e-5;
  bool header = false;
  bool no_normalize = false;
};

void add_solve_options(CLI::App* cmd, SolveOptions& o, bool with_point_params) {
  cmd->add_option("--data", o.data, "Dataset directory (view_k.csv, labels.csv)")->required();
  cmd->add_option("--clusters", o.clusters, "Number of clusters c")->required();
  if (with_point_params) {
    cmd->add_option("--alpha", o.alpha, "Self-expression ridge weight")->capture_default_str();
    cmd->add_option("--beta", o.beta, "Graph/embedding coupling")->capture_default_str();
    cmd->add_option("--gamma", o.gamma, "Partition alignment weight")->capture_default_str();
  }
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--init", o.init, "Initialization: random or spectral")
      ->check(CLI::IsMember({"random", "spectral"}))
      ->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "Maximum outer sweeps")->capture_default_str();
  cmd->add_option("--tol", o.tol, "Relative objective decrease tolerance")->capture_default_str();
  cmd->add_flag("--header", o.header, "Skip one header line in each view file");
  cmd->add_flag("--no-normalize", o.no_normalize, "Use features as given");
}

void check_solve_options(const SolveOptions& o) {
  if (o.clusters < 2) throw Error(ErrorKind::InvalidInput, "--clusters must be at least 2");
  if (o.max_iter < 1) throw Error(ErrorKind::InvalidInput, "--max-iter must be positive");
  if (!(o.tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "--tol must be non-negative");
}

MpacConfig make_config(const SolveOptions& o) {
  MpacConfig cfg;
  cfg.alpha = o.alpha;
  cfg.beta = o.beta;
  cfg.gamma = o.gamma;
  cfg.c = o.clusters;
  cfg.seed = o.seed;
  cfg.init = parse_init_mode(o.init);
  cfg.max_outer_iters = o.max_iter;
  cfg.rel_obj_tol = o.tol;
  return cfg;
}

MultiViewDataset prepare_data(const SolveOptions& o) {
  auto ds = load_dataset(o.data, IngestOptions{o.header});
  return o.no_normalize ? ds : normalize_views(ds);
}

struct RunOptions {
  SolveOptions solve;
  std::string out;
  std::string labels_out;
  std::string dump_graphs;
  std::string log;
};

int cmd_run(const RunOptions& o, std::ostream& out) {
  check_solve_options(o.solve);
  const auto start = std::chrono::steady_clock::now();
  const MpacConfig cfg = make_config(o.solve);
  const MultiViewDataset ds = prepare_data(o.solve);

  std::unique_ptr<std::ofstream> log;
  if (!o.log.empty()) {
    log = std::make_unique<std::ofstream>(o.log, std::ios::binary);
    if (!*log) throw Error(ErrorKind::NotFound, "cannot write " + o.log);
  }
  if (!o.dump_graphs.empty()) {
    std::error_code ec;
    fs::create_directories(o.dump_graphs, ec);
    if (ec) throw Error(ErrorKind::NotFound, "cannot create " + o.dump_graphs);
  }
  RunObserver observer;
  observer.on_sweep = [&](const MpacState& state, const SweepRecord& rec) {
    if (log) *log << sweep_line(rec).dump() << '\n' << std::flush;
    if (!o.dump_graphs.empty()) {
      for (std::size_t i = 0; i < state.views.size(); ++i) {
        write_file(fs::path(o.dump_graphs) / ("sweep_" + std::to_string(rec.sweep) + "_view_" +
                                             std::to_string(i) + ".csv"),
                   matrix_csv(state.views[i].graph.w_sym));
      }
    }
  };

  const MpacResult result = run(ds, cfg, observer);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ConfigEcho echo{o.solve.data, cfg.c,         cfg.alpha,          cfg.beta,
                  cfg.gamma,    cfg.seed,      std::string(to_string(cfg.init)),
                  cfg.max_outer_iters,         cfg.rel_obj_tol,    !o.solve.no_normalize,
                  o.solve.header};
  const RunReport report = make_report(echo, result, ds.labels(), seconds);

  if (!o.labels_out.empty()) {
    std::string text;
    for (int l : report.labels) text += std::to_string(l) + "\n";
    write_file(o.labels_out, text);
  }
  const std::string doc = to_json(report).dump(2) + "\n";
  if (o.out.empty()) {
    out << doc;
  } else {
    write_file(o.out, doc);
  }
  return kOk;
}

struct SynthOptions {
  int n_per_cluster = 50;
  int clusters = 3;
  int views = 2;
  double noise = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  const auto ds = synth_multiview(o.n_per_cluster, o.clusters, o.views, o.noise, o.seed);
  save_dataset(o.out, ds);
  out << "wrote " << ds.num_views() << " views x " << ds.samples() << " samples to "
      << o.out << "\n";
  return kOk;
}

struct SweepOptions {
  SolveOptions solve;
  std::string alpha_grid = "1";
  std::string beta_grid = "1";
  std::string gamma_grid = "1";
  std::string out;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  check_solve_options(o.solve);
  const auto alphas = parse_grid(o.alpha_grid);
  const auto betas = parse_grid(o.beta_grid);
  const auto gammas = parse_grid(o.gamma_grid);
  const MpacConfig cfg = make_config(o.solve);
  const MultiViewDataset ds = prepare_data(o.solve);
  const auto cells = grid_sweep(ds, cfg, alphas, betas, gammas);

  std::string text = "alpha,beta,gamma,status,ari,nmi,f_score,objective,iterations,error\n";
  bool any_ok = false;
  for (const auto& cell : cells) {
    any_ok = any_ok || cell.ok;
    text += format_double(cell.alpha) + "," + format_double(cell.beta) + "," +
            format_double(cell.gamma) + "," + (cell.ok ? "ok" : "failed") + ",";
    if (cell.metrics) {
      text += format_double(cell.metrics->ari) + "," + format_double(cell.metrics->nmi) + "," +
              format_double(cell.metrics->f_score) + ",";
    } else {
      text += ",,,";
    }
    if (cell.ok) {
      text += format_double(cell.objective) + "," + std::to_string(cell.iterations) + ",";
    } else {
      std::string msg = cell.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      }
      text += ",," + msg;
    }
    text += "\n";
  }
  if (!any_ok) throw Error(ErrorKind::NumericalError, "every sweep cell failed");
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view clustering by partition alignment", "mpac"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Cluster a dataset directory");
  add_solve_options(run_cmd, run_opts.solve, true);
  run_cmd->add_option("--out", run_opts.out, "Report JSON path (stdout if omitted)");
  run_cmd->add_option("--labels-out", run_opts.labels_out, "Predicted labels CSV path");
  run_cmd->add_option("--dump-graphs", run_opts.dump_graphs,
                      "Directory for per-sweep affinity matrices");
  run_cmd->add_option("--log", run_opts.log, "JSON-lines per-sweep diagnostics path");

  SynthOptions synth_opts;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic multi-view dataset");
  synth_cmd->add_option("--n-per-cluster", synth_opts.n_per_cluster)->capture_default_str();
  synth_cmd->add_option("--clusters", synth_opts.clusters)->capture_default_str();
  synth_cmd->add_option("--views", synth_opts.views)->capture_default_str();
  synth_cmd->add_option("--noise", synth_opts.noise)->capture_default_str();
  synth_cmd->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth_cmd->add_option("--out", synth_opts.out, "Output directory")->required();

  SweepOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over alpha, beta, gamma");
  add_solve_options(sweep_cmd, sweep_opts.solve, false);
  sweep_cmd->add_option("--alpha-grid", sweep_opts.alpha_grid, "e.g. 0.1,1,10")
      ->capture_default_str();
  sweep_cmd->add_option("--beta-grid", sweep_opts.beta_grid)->capture_default_str();
  sweep_cmd->add_option("--gamma-grid", sweep_opts.gamma_grid)->capture_default_str();
  sweep_cmd->add_option("--out", sweep_opts.out, "Results CSV path (stdout if omitted)");

  std::vector<const char*> argv{"mpac"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts, out);
    if (synth_cmd->parsed()) return cmd_synth(synth_opts, out);
    return cmd_sweep(sweep_opts, out);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    if (code == kUsage) err << "\n" << app.help();
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace mpac::cli
