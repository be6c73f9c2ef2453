#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geomap/config.hpp"

namespace geomap {

/// One evaluated (experiment, space, method, setting, classifier, trial)
/// combination. Failed cells carry NaN scores and an "error:" flag.
struct ReportCell {
  std::string experiment;
  std::string space;   // original | mapped
  std::string method;  // none, or the DR method
  int dim = 0;         // requested output dimension (DR sweep) or feature dimension
  int neighbors = 0;   // v_w = v_b used for the mapping
  int train_per_class = 0;
  std::string classifier;
  int trial = 0;
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  std::string flags;  // ';'-separated
  double time_affinity = 0.0;
  double time_cg = 0.0;
  double time_fit = 0.0;
  double time_predict = 0.0;
};

struct DimensionRow {
  int m = 0;
  double cost = 0.0;
  double oracle_cost = 0.0;
  double relative_gap = 0.0;  // |cost - oracle| / max(|oracle|, 1e-300)
  int iterations = 0;
  std::string termination;
  double seconds = 0.0;
};

struct ExperimentReport {
  std::vector<ReportCell> cells;
  std::vector<DimensionRow> dimension_rows;
  int best_dimension = 0;  // minimizer over dimension_rows
  std::vector<std::string> log;
};

// Each runner evaluates trial t on the split drawn with seed split.seed + t
// and a mapping fitted with seed gam.seed + t, so any single trial can be
// reproduced from (cfg, t) alone.
ExperimentReport run_classifier_table(const ExperimentConfig& cfg, const LabeledDataset& data);
ExperimentReport run_neighbor_sweep(const ExperimentConfig& cfg, const LabeledDataset& data);
ExperimentReport run_dimension_sweep(const ExperimentConfig& cfg, const LabeledDataset& data);
ExperimentReport run_dr_sweep(const ExperimentConfig& cfg, const LabeledDataset& data);
ExperimentReport run_train_size_sweep(const ExperimentConfig& cfg, const LabeledDataset& data);

/// Default mapped-dimension grid: n, n-1, ..., n-40, clamped at 1, distinct.
std::vector<int> default_dimension_grid(int n);

/// Writes cells.csv, summary.csv, config.echo, run.log and, when present,
/// dimension_sweep.csv into `dir` (created if needed).
void emit_report(const ExperimentReport& report, const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// Column names of cells.csv; the trailing four are timings.
const std::vector<std::string>& cell_columns();

}  // namespace geomap
