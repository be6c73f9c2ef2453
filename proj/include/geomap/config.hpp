#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geomap/classifiers.hpp"
#include "geomap/dataset.hpp"
#include "geomap/dr.hpp"
#include "geomap/mapping.hpp"
#include "geomap/synthetic.hpp"

namespace geomap {

/// Everything an experiment run depends on. `to_text` writes every field,
/// defaults included, and `parse_config` reads that text back unchanged.
struct ExperimentConfig {
  std::string dataset = "synthetic";  // file path, or "synthetic"
  std::string dataset_format = "auto";  // auto | csv | hsb
  SyntheticSpec synthetic;
  bool standardize = false;

  GamParams gam;
  SplitSpec split;
  int trials = 10;

  std::vector<ClassifierSpec> classifiers;
  ClassifierOptions classifier_options;

  std::vector<DrKind> dr_methods;
  std::vector<int> dr_dims;
  double kpca_gamma = 0.0;  // 0: 1 / input dimension
  int mfa_k1 = 9;
  int mfa_k2 = 9;

  std::vector<int> neighbor_grid;
  std::vector<int> dimension_grid;  // empty: n, n-1, ..., n-40 (clamped at 1)
  std::vector<int> train_size_grid;

  std::string output = "results";
  bool verbose = false;

  ExperimentConfig();
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Grammar: one `key = value` per line, `#` starts a comment, lists are
/// comma separated, integer lists also accept `first:last:step` ranges.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_text(const ExperimentConfig& cfg);

/// Applies a single `key = value` assignment (used for CLI overrides too).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Loads the configured dataset (or generates the synthetic one).
LabeledDataset load_experiment_dataset(const ExperimentConfig& cfg);

}  // namespace geomap
