#include "geomap/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <tuple>

#include "geomap/errors.hpp"
#include "geomap/metrics.hpp"

namespace geomap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TrialData {
  LabeledDataset train;
  LabeledDataset test;
  LabeledDataset mapped_train;
  LabeledDataset mapped_test;
  GamModel model;
};

IterationObserver verbose_observer(const ExperimentConfig& cfg) {
  if (!cfg.verbose) return {};
  static std::mutex mu;
  return [](const IterationInfo& info) {
    std::lock_guard lock(mu);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", info.iteration, info.cost, info.grad_norm, info.step);
    std::cerr << buf;
  };
}

TrialData prepare_trial(const ExperimentConfig& cfg, const LabeledDataset& data, int train_per_class, int trial,
                        int neighbors) {
  TrialData td;
  const Split split = split_per_class(data, {train_per_class, cfg.split.seed + static_cast<std::uint64_t>(trial)});
  td.train = split.train;
  td.test = split.test;
  if (cfg.standardize) {
    auto [train_std, stats] = standardize(td.train);
    td.train = std::move(train_std);
    td.test = standardize(td.test, stats).first;
  }
  GamParams params = cfg.gam;
  params.seed = cfg.gam.seed + static_cast<std::uint64_t>(trial);
  params.v_w = neighbors > 0 ? neighbors : cfg.gam.v_w;
  params.v_b = neighbors > 0 ? neighbors : cfg.gam.v_b;
  td.model = fit(td.train, params, verbose_observer(cfg));
  td.mapped_train = td.train.with_features(transform(td.model, td.train.features()));
  td.mapped_test = td.test.with_features(transform(td.model, td.test.features()));
  return td;
}

void score(ReportCell& cell, const ClassifierSpec& spec, const ClassifierOptions& opts, const LabeledDataset& train,
           const LabeledDataset& test) {
  auto t0 = Clock::now();
  const auto clf = fit_classifier(spec, train, opts);
  cell.time_fit = seconds_since(t0);
  t0 = Clock::now();
  const Labels predicted = clf->predict(test.features());
  cell.time_predict = seconds_since(t0);
  const ConfusionMatrix cm = confusion(test.labels(), predicted, test.class_count());
  cell.oa = overall_accuracy(cm);
  const auto aa = average_accuracy(cm);
  cell.aa = aa.value;
  const auto kappa = cohen_kappa(cm);
  cell.kappa = kappa.value;
  if (aa.empty_classes) cell.flags += (cell.flags.empty() ? "" : ";") + std::string("empty_class");
  if (kappa.degenerate) cell.flags += (cell.flags.empty() ? "" : ";") + std::string("kappa_degenerate");
}

void add_flag(ReportCell& cell, const std::string& flag) {
  cell.flags += (cell.flags.empty() ? "" : ";") + flag;
}

std::string cell_id(const ReportCell& c) {
  std::string id = "[" + c.experiment + " trial " + std::to_string(c.trial);
  for (const std::string* part : {&c.space, &c.method, &c.classifier})
    if (!part->empty()) id += " " + *part;
  return id + "] ";
}

// Re-throws with the cell identity prepended, preserving the error category.
template <typename F>
void annotated(const ReportCell& cell, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    const std::string what = cell_id(cell) + e.what();
    switch (e.kind()) {
      case ErrorKind::Config: throw ConfigError(what);
      case ErrorKind::Data: throw DataError(what);
      case ErrorKind::Numerical: throw NumericalError(what);
    }
    throw;
  }
}

ReportCell base_cell(const std::string& experiment, int trial, int train_per_class, int neighbors) {
  ReportCell c;
  c.experiment = experiment;
  c.method = "none";
  c.trial = trial;
  c.train_per_class = train_per_class;
  c.neighbors = neighbors;
  return c;
}

void stamp_mapping(ReportCell& cell, const GamModel& model) {
  cell.time_affinity = model.timings.affinity_seconds;
  cell.time_cg = model.timings.optimize_seconds;
  if (model.truncated_neighbors) add_flag(cell, "truncated");
  if (model.degenerate_affinity) add_flag(cell, "degenerate_affinity");
}

void log_trial(ExperimentReport& report, const std::string& what, int trial, const GamModel& model) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s trial %d: m=%d cost=%.10g iters=%d termination=%s restart=%d", what.c_str(),
                trial, model.output_dim(), model.final_cost, model.opt_result.iterations,
                to_string(model.opt_result.termination).c_str(), model.best_restart);
  report.log.emplace_back(buf);
}

}  // namespace

std::vector<int> default_dimension_grid(int n) {
  std::vector<int> grid;
  for (int m = n; m >= n - 40; --m) {
    const int v = std::max(1, m);
    if (grid.empty() || grid.back() != v) grid.push_back(v);
  }
  return grid;
}

ExperimentReport run_classifier_table(const ExperimentConfig& cfg, const LabeledDataset& data) {
  cfg.validate();
  ExperimentReport report;
  const int k = cfg.split.train_per_class;
  for (int t = 0; t < cfg.trials; ++t) {
    ReportCell proto = base_cell("table2", t, k, cfg.gam.v_w);
    TrialData td;
    annotated(proto, [&] { td = prepare_trial(cfg, data, k, t, 0); });
    log_trial(report, "table2", t, td.model);
    for (const char* space : {"original", "mapped"}) {
      const bool mapped = std::string(space) == "mapped";
      for (const auto& spec : cfg.classifiers) {
        ReportCell cell = proto;
        cell.space = space;
        cell.classifier = spec.name();
        cell.dim = mapped ? td.model.output_dim() : td.train.dim();
        stamp_mapping(cell, td.model);
        annotated(cell, [&] {
          score(cell, spec, cfg.classifier_options, mapped ? td.mapped_train : td.train,
                mapped ? td.mapped_test : td.test);
        });
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

ExperimentReport run_neighbor_sweep(const ExperimentConfig& cfg, const LabeledDataset& data) {
  cfg.validate();
  if (cfg.neighbor_grid.empty()) throw ConfigError("sweep.neighbors must not be empty");
  ExperimentReport report;
  const int k = cfg.split.train_per_class;
  const ClassifierSpec svm = ClassifierSpec::parse("svm");
  for (int v : cfg.neighbor_grid)
    for (int t = 0; t < cfg.trials; ++t) {
      ReportCell proto = base_cell("table1", t, k, v);
      TrialData td;
      annotated(proto, [&] { td = prepare_trial(cfg, data, k, t, v); });
      log_trial(report, "table1 N=" + std::to_string(v), t, td.model);
      for (const char* space : {"original", "mapped"}) {
        const bool mapped = std::string(space) == "mapped";
        ReportCell cell = proto;
        cell.space = space;
        cell.classifier = svm.name();
        cell.dim = mapped ? td.model.output_dim() : td.train.dim();
        stamp_mapping(cell, td.model);
        annotated(cell, [&] {
          score(cell, svm, cfg.classifier_options, mapped ? td.mapped_train : td.train,
                mapped ? td.mapped_test : td.test);
        });
        report.cells.push_back(std::move(cell));
      }
    }
  return report;
}

ExperimentReport run_dimension_sweep(const ExperimentConfig& cfg, const LabeledDataset& data) {
  cfg.validate();
  ExperimentReport report;
  const Split split = split_per_class(data, {cfg.split.train_per_class, cfg.split.seed});
  LabeledDataset train = split.train;
  if (cfg.standardize) train = standardize(train).first;
  const int n = train.dim();
  const std::vector<int> grid = cfg.dimension_grid.empty() ? default_dimension_grid(n) : cfg.dimension_grid;

  const AffinityGraph graph =
      build_affinity(neighbor_sets(train, cfg.gam.v_w, cfg.gam.v_b), train.labels());
  const Eigen::MatrixXd energy = graph_energy_matrix(train.features(), graph);

  double best = std::numeric_limits<double>::infinity();
  for (int m : grid) {
    if (m < 1 || m > n) throw ConfigError("sweep.dims entry " + std::to_string(m) + " outside 1.." + std::to_string(n));
    GamParams params = cfg.gam;
    params.target_dim = m;
    const auto t0 = Clock::now();
    const GamModel model = fit(train, params, verbose_observer(cfg));
    DimensionRow row;
    row.m = m;
    row.cost = model.final_cost;
    row.seconds = seconds_since(t0);
    row.oracle_cost = spectral_oracle(energy, m).cost;
    row.relative_gap = std::abs(row.cost - row.oracle_cost) / std::max(std::abs(row.oracle_cost), 1e-300);
    row.iterations = model.opt_result.iterations;
    row.termination = to_string(model.opt_result.termination);
    if (row.cost < best) {
      best = row.cost;
      report.best_dimension = m;
    }
    report.dimension_rows.push_back(row);
  }
  report.log.push_back("fig2: lowest cost at m=" + std::to_string(report.best_dimension) + " (n=" +
                       std::to_string(n) + ")");
  return report;
}

ExperimentReport run_dr_sweep(const ExperimentConfig& cfg, const LabeledDataset& data) {
  cfg.validate();
  if (cfg.dr_methods.empty() || cfg.dr_dims.empty()) throw ConfigError("dr.methods and dr.dims must not be empty");
  ExperimentReport report;
  const int k = cfg.split.train_per_class;
  const ClassifierSpec svm = ClassifierSpec::parse("svm");
  for (int t = 0; t < cfg.trials; ++t) {
    ReportCell proto = base_cell("dr-sweep", t, k, cfg.gam.v_w);
    TrialData td;
    annotated(proto, [&] { td = prepare_trial(cfg, data, k, t, 0); });
    log_trial(report, "dr-sweep", t, td.model);
    for (DrKind method : cfg.dr_methods)
      for (int d : cfg.dr_dims)
        for (const char* space : {"original", "mapped"}) {
          const bool mapped = std::string(space) == "mapped";
          const LabeledDataset& train = mapped ? td.mapped_train : td.train;
          const LabeledDataset& test = mapped ? td.mapped_test : td.test;
          ReportCell cell = proto;
          cell.space = space;
          cell.method = to_string(method);
          cell.classifier = svm.name();
          cell.dim = d;
          stamp_mapping(cell, td.model);
          const int limit = max_dr_dim(method, train.dim(), train.sample_count(), train.class_count());
          const int used = std::min(d, limit);
          if (used != d) add_flag(cell, "clamped_to=" + std::to_string(used));
          annotated(cell, [&] {
            DrModel dr;
            switch (method) {
              case DrKind::PCA: dr = fit_pca(train.features(), used); break;
              case DrKind::LDA: dr = fit_lda(train.features(), train.labels(), used); break;
              case DrKind::KPCA:
                dr = fit_kpca(train.features(), used, cfg.kpca_gamma > 0.0 ? cfg.kpca_gamma : 1.0 / train.dim());
                break;
              case DrKind::MFA: dr = fit_mfa(train.features(), train.labels(), used, cfg.mfa_k1, cfg.mfa_k2); break;
            }
            if (dr.degenerate) add_flag(cell, "dr_degenerate");
            score(cell, svm, cfg.classifier_options, train.with_features(apply_dr(dr, train.features())),
                  test.with_features(apply_dr(dr, test.features())));
          });
          report.cells.push_back(std::move(cell));
        }
  }
  return report;
}

ExperimentReport run_train_size_sweep(const ExperimentConfig& cfg, const LabeledDataset& data) {
  cfg.validate();
  if (cfg.train_size_grid.empty()) throw ConfigError("sweep.train_sizes must not be empty");
  ExperimentReport report;
  const ClassifierSpec svm = ClassifierSpec::parse("svm");
  for (int k : cfg.train_size_grid)
    for (int t = 0; t < cfg.trials; ++t) {
      ReportCell proto = base_cell("train-sweep", t, k, cfg.gam.v_w);
      proto.classifier = svm.name();
      TrialData td;
      try {
        td = prepare_trial(cfg, data, k, t, 0);
      } catch (const DataError& e) {
        // Isolated failure: this train size cannot be drawn, other rows go on.
        for (const char* space : {"original", "mapped"}) {
          ReportCell cell = proto;
          cell.space = space;
          cell.oa = cell.aa = cell.kappa = kNaN;
          add_flag(cell, std::string("error: ") + e.what());
          report.cells.push_back(std::move(cell));
        }
        report.log.push_back("train-sweep k=" + std::to_string(k) + " trial " + std::to_string(t) +
                             " failed: " + e.what());
        continue;
      }
      log_trial(report, "train-sweep k=" + std::to_string(k), t, td.model);
      for (const char* space : {"original", "mapped"}) {
        const bool mapped = std::string(space) == "mapped";
        ReportCell cell = proto;
        cell.space = space;
        cell.dim = mapped ? td.model.output_dim() : td.train.dim();
        stamp_mapping(cell, td.model);
        annotated(cell, [&] {
          score(cell, svm, cfg.classifier_options, mapped ? td.mapped_train : td.train,
                mapped ? td.mapped_test : td.test);
        });
        report.cells.push_back(std::move(cell));
      }
    }
  return report;
}

const std::vector<std::string>& cell_columns() {
  static const std::vector<std::string> columns = {
      "experiment", "space", "method", "dim", "neighbors", "train_per_class", "classifier", "trial", "oa", "aa",
      "kappa", "flags", "time_affinity", "time_cg", "time_fit", "time_predict"};
  return columns;
}

namespace {

std::string g17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string f6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

struct Moments {
  int count = 0;
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.count = static_cast<int>(v.size());
  if (v.empty()) return {0, kNaN, kNaN};
  for (double x : v) m.mean += x;
  m.mean /= m.count;
  if (m.count > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / (m.count - 1));
  }
  return m;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

void emit_report(const ExperimentReport& report, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());

  {
    auto out = open_out(dir / "cells.csv");
    write_header(out, cell_columns());
    for (const auto& c : report.cells)
      out << c.experiment << ',' << c.space << ',' << c.method << ',' << c.dim << ',' << c.neighbors << ','
          << c.train_per_class << ',' << c.classifier << ',' << c.trial << ',' << g17(c.oa) << ',' << g17(c.aa)
          << ',' << g17(c.kappa) << ',' << csv_field(c.flags) << ',' << f6(c.time_affinity) << ','
          << f6(c.time_cg) << ',' << f6(c.time_fit) << ',' << f6(c.time_predict) << '\n';
  }

  {
    using Key = std::tuple<std::string, std::string, std::string, int, int, int, std::string>;
    std::vector<Key> order;
    std::map<Key, std::vector<const ReportCell*>> groups;
    for (const auto& c : report.cells) {
      Key key{c.experiment, c.space, c.method, c.dim, c.neighbors, c.train_per_class, c.classifier};
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.push_back(&c);
    }
    auto out = open_out(dir / "summary.csv");
    write_header(out, {"experiment", "space", "method", "dim", "neighbors", "train_per_class", "classifier",
                       "trials", "errors", "oa_mean", "oa_std", "aa_mean", "aa_std", "kappa_mean", "kappa_std",
                       "time_mapping_mean", "time_fit_mean", "time_predict_mean"});
    for (const auto& key : order) {
      std::vector<double> oa, aa, kappa, tmap, tfit, tpred;
      int errors = 0;
      for (const auto* c : groups[key]) {
        if (std::isnan(c->oa)) {
          ++errors;
          continue;
        }
        oa.push_back(c->oa);
        aa.push_back(c->aa);
        kappa.push_back(c->kappa);
        tmap.push_back(c->time_affinity + c->time_cg);
        tfit.push_back(c->time_fit);
        tpred.push_back(c->time_predict);
      }
      const auto [exp, space, method, dim, nb, tpc, clf] = key;
      const Moments moa = moments(oa), maa = moments(aa), mk = moments(kappa);
      out << exp << ',' << space << ',' << method << ',' << dim << ',' << nb << ',' << tpc << ',' << clf << ','
          << groups[key].size() << ',' << errors << ',' << g17(moa.mean) << ',' << g17(moa.std) << ','
          << g17(maa.mean) << ',' << g17(maa.std) << ',' << g17(mk.mean) << ',' << g17(mk.std) << ','
          << f6(moments(tmap).mean) << ',' << f6(moments(tfit).mean) << ',' << f6(moments(tpred).mean) << '\n';
    }
  }

  if (!report.dimension_rows.empty()) {
    auto out = open_out(dir / "dimension_sweep.csv");
    write_header(out, {"m", "cost", "oracle_cost", "relative_gap", "iterations", "termination", "seconds"});
    for (const auto& r : report.dimension_rows)
      out << r.m << ',' << g17(r.cost) << ',' << g17(r.oracle_cost) << ',' << g17(r.relative_gap) << ','
          << r.iterations << ',' << r.termination << ',' << f6(r.seconds) << '\n';
  }

  {
    auto out = open_out(dir / "config.echo");
    out << to_text(cfg);
  }
  {
    auto out = open_out(dir / "run.log");
    for (const auto& line : report.log) out << line << '\n';
  }
}

}  // namespace geomap
