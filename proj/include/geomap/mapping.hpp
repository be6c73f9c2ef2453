#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "geomap/affinity.hpp"
#include "geomap/dataset.hpp"
#include "geomap/stiefel.hpp"

namespace geomap {

struct GamParams {
  int v_w = 9;
  int v_b = 9;
  std::optional<int> target_dim;  // m; n - 1 when unset
  int restarts = 3;
  std::uint64_t seed = 0;
  CgOptions cg;

  /// m for data of dimension n.
  int resolved_dim(int n) const { return target_dim.value_or(std::max(1, n - 1)); }
  bool operator==(const GamParams&) const = default;
};

struct GamTimings {
  double affinity_seconds = 0.0;
  double optimize_seconds = 0.0;
};

/// Fitted geometry-aware projection x -> U^T x.
struct GamModel {
  OrthonormalFrame frame;
  GamParams params;
  double final_cost = 0.0;
  OptResult opt_result;
  std::uint64_t train_fingerprint = 0;
  bool truncated_neighbors = false;  // some N_w / N_b list was short
  bool degenerate_affinity = false;  // A == 0, objective constant
  int best_restart = 0;
  GamTimings timings;

  int input_dim() const { return frame.rows(); }
  int output_dim() const { return frame.cols(); }
};

/// M = X (D - A) X^T, the n x n matrix the objective is a trace form of.
Eigen::MatrixXd graph_energy_matrix(const Eigen::MatrixXd& x, const AffinityGraph& graph);

/// sum over ordered pairs of A_ij ||U^T x_i - U^T x_j||^2, evaluated as 2 tr(U^T M U).
double cost(const OrthonormalFrame& u, const Eigen::MatrixXd& x, const AffinityGraph& graph);
double cost(const Eigen::MatrixXd& u, const Eigen::MatrixXd& energy);

/// 4 M U: exact gradient of the cost as a function of an unconstrained U.
Eigen::MatrixXd euclidean_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& x, const AffinityGraph& graph);
Eigen::MatrixXd euclidean_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& energy);

/// Builds the affinity graph from `train`, runs `restarts` seeded CG solves
/// and keeps the lowest final cost (ties: lower restart index).
/// The observer, if given, must be callable concurrently.
GamModel fit(const LabeledDataset& train, const GamParams& params, const IterationObserver& observer = {});

/// U^T X
Eigen::MatrixXd transform(const GamModel& model, const Eigen::MatrixXd& x);

struct SpectralSolution {
  OrthonormalFrame frame;
  double cost;
  Eigen::VectorXd eigenvalues;  // of M, ascending
};

/// Exact minimizer: eigenvectors of the m smallest eigenvalues of M; cost is
/// 2 times their sum.
SpectralSolution spectral_oracle(const Eigen::MatrixXd& x, const AffinityGraph& graph, int m);
SpectralSolution spectral_oracle(const Eigen::MatrixXd& energy, int m);

/// Text header followed by U as row-major little-endian float64.
void save_model(const GamModel& model, std::ostream& out);
void save_model(const GamModel& model, const std::filesystem::path& path);
GamModel load_model(std::istream& in);
GamModel load_model(const std::filesystem::path& path);

}  // namespace geomap
