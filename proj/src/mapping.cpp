#include "geomap/mapping.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "geomap/errors.hpp"
#include "geomap/kernels.hpp"
#include "geomap/rng.hpp"

namespace geomap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_energy_shapes(const Eigen::MatrixXd& u, const Eigen::MatrixXd& energy) {
  if (energy.rows() != energy.cols() || u.rows() != energy.rows())
    throw DataError("cost: U has " + std::to_string(u.rows()) + " rows but data dimension is " +
                    std::to_string(energy.rows()));
}

}  // namespace

Eigen::MatrixXd graph_energy_matrix(const Eigen::MatrixXd& x, const AffinityGraph& graph) {
  if (graph.size() != x.cols())
    throw DataError("affinity graph has " + std::to_string(graph.size()) + " nodes but X has " +
                    std::to_string(x.cols()) + " samples");
  return parallel::graph_scatter(x, signed_laplacian(graph));
}

double cost(const Eigen::MatrixXd& u, const Eigen::MatrixXd& energy) {
  check_energy_shapes(u, energy);
  return 2.0 * (u.transpose() * energy * u).trace();
}

double cost(const OrthonormalFrame& u, const Eigen::MatrixXd& x, const AffinityGraph& graph) {
  if (u.rows() != x.rows()) throw DataError("cost: frame rows do not match data dimension");
  return cost(u.matrix(), graph_energy_matrix(x, graph));
}

Eigen::MatrixXd euclidean_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& energy) {
  check_energy_shapes(u, energy);
  return 4.0 * energy * u;
}

Eigen::MatrixXd euclidean_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& x, const AffinityGraph& graph) {
  if (u.rows() != x.rows()) throw DataError("euclidean_gradient: U rows do not match data dimension");
  return euclidean_gradient(u, graph_energy_matrix(x, graph));
}

GamModel fit(const LabeledDataset& train, const GamParams& params, const IterationObserver& observer) {
  const int n = train.dim();
  const int m = params.resolved_dim(n);
  if (m < 1 || m > n)
    throw ConfigError("target dimension m=" + std::to_string(m) + " outside 1.." + std::to_string(n));
  if (params.restarts < 1) throw ConfigError("restarts must be >= 1");
  params.cg.validate();

  GamModel model;
  model.params = params;
  model.train_fingerprint = train.fingerprint();

  auto t0 = Clock::now();
  const AffinityGraph graph = build_affinity(neighbor_sets(train, params.v_w, params.v_b), train.labels());
  const Eigen::MatrixXd energy = graph_energy_matrix(train.features(), graph);
  model.timings.affinity_seconds = seconds_since(t0);
  model.truncated_neighbors = graph.source.truncated;

  t0 = Clock::now();
  if (graph.entries.nonZeros() == 0) {
    // Objective is identically zero: every feasible frame is optimal.
    model.degenerate_affinity = true;
    model.frame = random_frame(n, m, derive_seed(params.seed, 0));
    model.opt_result.frame = model.frame;
    model.opt_result.cost_trace = {0.0};
    model.opt_result.termination = Termination::GradTol;
    model.timings.optimize_seconds = seconds_since(t0);
    return model;
  }

  const CostFn f = [&energy](const OrthonormalFrame& u) { return cost(u.matrix(), energy); };
  const EuclideanGradFn g = [&energy](const OrthonormalFrame& u) {
    return euclidean_gradient(u.matrix(), energy);
  };

  std::vector<OptResult> runs(params.restarts);
  std::vector<std::string> failures(params.restarts);
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < params.restarts; ++r) {
    try {
      runs[r] = minimize_cg(f, g, random_frame(n, m, derive_seed(params.seed, r)), params.cg, observer);
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  }
  for (int r = 0; r < params.restarts; ++r)
    if (!failures[r].empty()) throw NumericalError("restart " + std::to_string(r) + ": " + failures[r]);

  int best = 0;
  for (int r = 1; r < params.restarts; ++r)
    if (runs[r].cost < runs[best].cost) best = r;
  model.best_restart = best;
  model.opt_result = std::move(runs[best]);
  model.frame = model.opt_result.frame;
  model.final_cost = model.opt_result.cost;
  model.timings.optimize_seconds = seconds_since(t0);
  return model;
}

Eigen::MatrixXd transform(const GamModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.input_dim())
    throw DataError("transform: model expects " + std::to_string(model.input_dim()) +
                    "-dimensional data, got " + std::to_string(x.rows()));
  return model.frame.matrix().transpose() * x;
}

SpectralSolution spectral_oracle(const Eigen::MatrixXd& energy, int m) {
  const auto n = energy.rows();
  if (m < 1 || m > n) throw ConfigError("spectral_oracle: m outside 1..n");
  if (!energy.allFinite()) throw NumericalError("spectral_oracle: non-finite input");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(energy);
  if (eig.info() != Eigen::Success) throw NumericalError("spectral_oracle: eigensolver failed");
  const Eigen::MatrixXd basis = eig.eigenvectors().leftCols(m);
  return {OrthonormalFrame(basis), 2.0 * eig.eigenvalues().head(m).sum(), eig.eigenvalues()};
}

SpectralSolution spectral_oracle(const Eigen::MatrixXd& x, const AffinityGraph& graph, int m) {
  return spectral_oracle(graph_energy_matrix(x, graph), m);
}

namespace {

constexpr const char* kModelMagic = "geomap-model";
constexpr int kModelVersion = 1;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_model(const GamModel& model, std::ostream& out) {
  const auto& p = model.params;
  const auto& r = model.opt_result;
  out << kModelMagic << ' ' << kModelVersion << '\n'
      << "n " << model.input_dim() << '\n'
      << "m " << model.output_dim() << '\n'
      << "v_w " << p.v_w << '\n'
      << "v_b " << p.v_b << '\n'
      << "target_dim " << (p.target_dim ? std::to_string(*p.target_dim) : "auto") << '\n'
      << "restarts " << p.restarts << '\n'
      << "seed " << p.seed << '\n'
      << "cg.max_iters " << p.cg.max_iters << '\n'
      << "cg.grad_tol " << fmt_double(p.cg.grad_tol) << '\n'
      << "cg.armijo_c1 " << fmt_double(p.cg.armijo_c1) << '\n'
      << "cg.backtrack_factor " << fmt_double(p.cg.backtrack_factor) << '\n'
      << "cg.max_backtracks " << p.cg.max_backtracks << '\n'
      << "cg.initial_step " << fmt_double(p.cg.initial_step) << '\n'
      << "final_cost " << fmt_double(model.final_cost) << '\n'
      << "grad_norm " << fmt_double(r.grad_norm) << '\n'
      << "iterations " << r.iterations << '\n'
      << "termination " << to_string(r.termination) << '\n'
      << "best_restart " << model.best_restart << '\n'
      << "truncated_neighbors " << int(model.truncated_neighbors) << '\n'
      << "degenerate_affinity " << int(model.degenerate_affinity) << '\n'
      << "train_fingerprint " << model.train_fingerprint << '\n'
      << "data\n";
  const auto& u = model.frame.matrix();
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = u;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
  if (!out) throw DataError("model write failed");
}

void save_model(const GamModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(model, out);
}

GamModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != std::string(kModelMagic) + ' ' + std::to_string(kModelVersion))
    throw DataError("not a geomap model (bad header line)");
  std::map<std::string, std::string> kv;
  while (std::getline(in, line) && line != "data") {
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw DataError("malformed model header line: " + line);
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  if (line != "data") throw DataError("model header not terminated");
  auto get = [&kv](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DataError("model header missing '" + key + "'");
    return it->second;
  };
  auto as_int = [&](const std::string& key) { return std::stoi(get(key)); };
  auto as_double = [&](const std::string& key) { return std::strtod(get(key).c_str(), nullptr); };

  GamModel model;
  try {
    const int n = as_int("n");
    const int m = as_int("m");
    auto& p = model.params;
    p.v_w = as_int("v_w");
    p.v_b = as_int("v_b");
    if (get("target_dim") != "auto") p.target_dim = as_int("target_dim");
    p.restarts = as_int("restarts");
    p.seed = std::stoull(get("seed"));
    p.cg.max_iters = as_int("cg.max_iters");
    p.cg.grad_tol = as_double("cg.grad_tol");
    p.cg.armijo_c1 = as_double("cg.armijo_c1");
    p.cg.backtrack_factor = as_double("cg.backtrack_factor");
    p.cg.max_backtracks = as_int("cg.max_backtracks");
    p.cg.initial_step = as_double("cg.initial_step");
    model.final_cost = as_double("final_cost");
    model.opt_result.grad_norm = as_double("grad_norm");
    model.opt_result.iterations = as_int("iterations");
    const auto& term = get("termination");
    model.opt_result.termination = term == "grad_tol"           ? Termination::GradTol
                                   : term == "line_search_fail" ? Termination::LineSearchFail
                                                                : Termination::MaxIters;
    model.best_restart = as_int("best_restart");
    model.truncated_neighbors = as_int("truncated_neighbors") != 0;
    model.degenerate_affinity = as_int("degenerate_affinity") != 0;
    model.train_fingerprint = std::stoull(get("train_fingerprint"));

    if (n < 1 || m < 1 || m > n) throw DataError("model header has invalid dimensions");
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, m);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * rm.size()))
      throw DataError("model payload truncated");
    model.frame = OrthonormalFrame(Eigen::MatrixXd(rm));
  } catch (const std::invalid_argument&) {
    throw DataError("model header contains a non-numeric value");
  } catch (const std::out_of_range&) {
    throw DataError("model header value out of range");
  }
  model.opt_result.frame = model.frame;
  model.opt_result.cost = model.final_cost;
  model.opt_result.cost_trace = {model.final_cost};
  return model;
}

GamModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace geomap
