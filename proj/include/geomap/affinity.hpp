#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "geomap/dataset.hpp"

namespace geomap {

/// Within-class and between-class nearest neighbours of every sample.
/// Lists hold 0-based sample indices, sorted ascending.
struct NeighborSets {
  std::vector<std::vector<int>> within;
  std::vector<std::vector<int>> between;
  int v_w = 0;
  int v_b = 0;
  /// Set when some sample had fewer candidates than v_w (or v_b).
  bool truncated = false;
};

/// Signed symmetric graph: +1 within-class neighbours, -1 between-class
/// neighbours, 0 elsewhere.
struct AffinityGraph {
  Eigen::SparseMatrix<int> entries;
  NeighborSets source;

  int size() const noexcept { return static_cast<int>(entries.rows()); }
  Eigen::MatrixXd dense() const;
};

/// Brute-force Euclidean kNN restricted to same-label / other-label pools.
/// Distance ties go to the smaller sample index.
NeighborSets neighbor_sets(const LabeledDataset& train, int v_w, int v_b);

/// Same as above on raw columns + labels (labels need not be contiguous).
NeighborSets neighbor_sets(const Eigen::MatrixXd& x, const Labels& labels, int v_w, int v_b);

/// A_ij = g_w(i, j) - g_b(i, j), each symmetrized with "j in N(i) or i in N(j)".
AffinityGraph build_affinity(const NeighborSets& sets, const Labels& labels);

/// Unsigned symmetric 0/1 adjacency from per-sample neighbour lists.
Eigen::SparseMatrix<int> symmetric_adjacency(const std::vector<std::vector<int>>& lists);

/// D - A with D = diag(row sums of A). Indefinite in general.
Eigen::MatrixXd signed_laplacian(const AffinityGraph& graph);
Eigen::MatrixXd graph_laplacian(const Eigen::SparseMatrix<int>& adjacency);

/// Matrix Market coordinate text, 1-based, one line per stored nonzero.
void write_matrix_market(const AffinityGraph& graph, std::ostream& out);
void write_matrix_market(const AffinityGraph& graph, const std::filesystem::path& path);

}  // namespace geomap
