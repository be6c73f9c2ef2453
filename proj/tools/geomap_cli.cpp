// geomap: fit/apply geometry-aware projections and run the evaluation
// protocols from the command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geomap/affinity.hpp"
#include "geomap/config.hpp"
#include "geomap/errors.hpp"
#include "geomap/experiment.hpp"
#include "geomap/mapping.hpp"
#include "geomap/synthetic.hpp"

namespace {

using namespace geomap;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool verbose = false;
};

ExperimentConfig resolve_config(const GlobalFlags& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) {
    cfg.split.seed = *g.seed;
    cfg.gam.seed = *g.seed;
  }
  if (!g.out.empty()) cfg.output = g.out;
  if (g.verbose) cfg.verbose = true;
  cfg.validate();
  return cfg;
}

int run_experiment(const std::string& which, const GlobalFlags& g) {
  const ExperimentConfig cfg = resolve_config(g);
  const LabeledDataset data = load_experiment_dataset(cfg);
  ExperimentReport report;
  if (which == "table2") report = run_classifier_table(cfg, data);
  else if (which == "table1") report = run_neighbor_sweep(cfg, data);
  else if (which == "fig2") report = run_dimension_sweep(cfg, data);
  else if (which == "dr-sweep") report = run_dr_sweep(cfg, data);
  else report = run_train_size_sweep(cfg, data);
  emit_report(report, cfg, cfg.output);
  std::cout << which << ": " << report.cells.size() << " cells";
  if (!report.dimension_rows.empty()) std::cout << ", lowest cost at m=" << report.best_dimension;
  std::cout << " -> " << cfg.output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised geometry-aware linear mapping for labeled high-dimensional data"};
  app.require_subcommand(1);

  GlobalFlags global;
  auto add_globals = [&global](CLI::App* cmd) {
    cmd->add_option("--config", global.config, "Experiment config file (key = value)");
    cmd->add_option("--seed", global.seed, "Base seed for splits and mapping restarts");
    cmd->add_option("--out", global.out, "Output path (directory for experiments, file otherwise)");
    cmd->add_flag("--verbose", global.verbose, "Log CG iterations (iter,cost,grad_norm,step) to stderr");
  };

  // gam fit / gam transform
  auto* gam = app.add_subcommand("gam", "Fit or apply a mapping");
  gam->require_subcommand(1);
  auto* gam_fit = gam->add_subcommand("fit", "Fit a mapping on a labeled dataset");
  std::string data_path, model_path, affinity_path;
  std::optional<int> v_w, v_b, dim, restarts, max_iters;
  std::optional<double> grad_tol;
  gam_fit->add_option("--data", data_path, "Training data (.csv or .hsb)")->required();
  gam_fit->add_option("--v-w", v_w, "Within-class neighbours");
  gam_fit->add_option("--v-b", v_b, "Between-class neighbours");
  gam_fit->add_option("--dim", dim, "Target dimension m (default n-1)");
  gam_fit->add_option("--restarts", restarts, "Random restarts");
  gam_fit->add_option("--max-iters", max_iters, "CG iteration cap");
  gam_fit->add_option("--grad-tol", grad_tol, "CG gradient-norm tolerance");
  gam_fit->add_option("--affinity-out", affinity_path, "Also write the signed affinity as Matrix Market");
  add_globals(gam_fit);

  auto* gam_transform = gam->add_subcommand("transform", "Project a dataset with a fitted mapping");
  gam_transform->add_option("--model", model_path, "Model file from 'gam fit'")->required();
  gam_transform->add_option("--data", data_path, "Data to project (.csv or .hsb)")->required();
  add_globals(gam_transform);

  // experiment <protocol>
  auto* experiment = app.add_subcommand("experiment", "Run an evaluation protocol");
  experiment->require_subcommand(1);
  std::string which;
  for (const char* name : {"table2", "table1", "fig2", "dr-sweep", "train-sweep"}) {
    auto* sub = experiment->add_subcommand(name);
    add_globals(sub);
    sub->callback([&which, name] { which = name; });
  }
  experiment->get_subcommand("table2")->description("Classifier comparison, original vs mapped space");
  experiment->get_subcommand("table1")->description("Neighbour-count sweep with a linear SVM");
  experiment->get_subcommand("fig2")->description("Final cost against mapped dimension");
  experiment->get_subcommand("dr-sweep")->description("PCA/LDA/KPCA/MFA + SVM over output dimensions");
  experiment->get_subcommand("train-sweep")->description("Train-size sweep with timings");

  // dataset convert / dataset synth
  auto* dataset = app.add_subcommand("dataset", "Dataset utilities");
  dataset->require_subcommand(1);
  auto* convert = dataset->add_subcommand("convert", "Convert between CSV and HSB (by extension)");
  std::string in_path;
  convert->add_option("--in", in_path, "Input file")->required();
  add_globals(convert);
  auto* synth = dataset->add_subcommand("synth", "Write the synthetic Gaussian benchmark");
  SyntheticSpec synth_spec;
  synth->add_option("--classes", synth_spec.classes);
  synth->add_option("--dim", synth_spec.dim);
  synth->add_option("--per-class", synth_spec.per_class);
  add_globals(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gam_fit->parsed()) {
      ExperimentConfig cfg = resolve_config(global);
      GamParams params = cfg.gam;
      if (v_w) params.v_w = *v_w;
      if (v_b) params.v_b = *v_b;
      if (dim) params.target_dim = *dim;
      if (restarts) params.restarts = *restarts;
      if (max_iters) params.cg.max_iters = *max_iters;
      if (grad_tol) params.cg.grad_tol = *grad_tol;
      if (global.out.empty()) throw ConfigError("gam fit: --out <model file> is required");
      const LabeledDataset data = load_dataset(data_path);
      IterationObserver observer;
      if (global.verbose) observer = make_iteration_logger(std::cerr);
      const GamModel model = fit(data, params, observer);
      save_model(model, global.out);
      if (!affinity_path.empty())
        write_matrix_market(build_affinity(neighbor_sets(data, params.v_w, params.v_b), data.labels()), affinity_path);
      std::cout << "fitted " << model.input_dim() << " -> " << model.output_dim() << ", cost " << model.final_cost
                << " (" << to_string(model.opt_result.termination) << ", " << model.opt_result.iterations
                << " iterations)\n";
      return 0;
    }
    if (gam_transform->parsed()) {
      if (global.out.empty()) throw ConfigError("gam transform: --out <csv file> is required");
      const GamModel model = load_model(model_path);
      const LabeledDataset data = load_dataset(data_path);
      save_csv(data.with_features(transform(model, data.features())), global.out);
      return 0;
    }
    if (!which.empty()) return run_experiment(which, global);
    if (convert->parsed()) {
      if (global.out.empty()) throw ConfigError("dataset convert: --out is required");
      const LabeledDataset data = load_dataset(in_path);
      if (std::filesystem::path(global.out).extension() == ".hsb") save_hsb(data, global.out);
      else save_csv(data, global.out);
      return 0;
    }
    if (synth->parsed()) {
      if (global.out.empty()) throw ConfigError("dataset synth: --out is required");
      if (global.seed) synth_spec.seed = *global.seed;
      const LabeledDataset data = gaussian_benchmark(synth_spec);
      if (std::filesystem::path(global.out).extension() == ".hsb") save_hsb(data, global.out);
      else save_csv(data, global.out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Numerical);
  }
  return 1;
}
