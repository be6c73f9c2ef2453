#include "geomap/affinity.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>

#include "geomap/errors.hpp"
#include "geomap/kernels.hpp"

namespace geomap {

Eigen::MatrixXd AffinityGraph::dense() const { return Eigen::MatrixXd(entries.cast<double>()); }

NeighborSets neighbor_sets(const LabeledDataset& train, int v_w, int v_b) {
  if (train.class_count() < 2) throw DataError("neighbor_sets: need at least two classes");
  return neighbor_sets(train.features(), train.labels(), v_w, v_b);
}

NeighborSets neighbor_sets(const Eigen::MatrixXd& x, const Labels& labels, int v_w, int v_b) {
  if (v_w < 1 || v_b < 1) throw ConfigError("neighbour counts v_w and v_b must be >= 1");
  const int p = static_cast<int>(x.cols());
  if (static_cast<int>(labels.size()) != p) throw DataError("neighbor_sets: label count mismatch");

  const Eigen::MatrixXd dist = parallel::pairwise_sq_distances(x);
  NeighborSets sets;
  sets.v_w = v_w;
  sets.v_b = v_b;
  sets.within.resize(p);
  sets.between.resize(p);

  // Each row is independent and ordered by (distance, index), so the result
  // does not depend on scheduling.
  std::vector<char> short_row(p, 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < p; ++i) {
    std::vector<int> same, other;
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      (labels[j] == labels[i] ? same : other).push_back(j);
    }
    auto closest = [&](std::vector<int>& pool, int v) {
      const auto take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(v));
      std::partial_sort(pool.begin(), pool.begin() + take, pool.end(), [&](int a, int b) {
        const double da = dist(a, i), db = dist(b, i);
        return da < db || (da == db && a < b);
      });
      pool.resize(take);
      std::sort(pool.begin(), pool.end());
      return take < static_cast<std::size_t>(v);
    };
    const bool short_w = closest(same, v_w);
    const bool short_b = closest(other, v_b);
    short_row[i] = short_w || short_b;
    sets.within[i] = std::move(same);
    sets.between[i] = std::move(other);
  }
  sets.truncated = std::any_of(short_row.begin(), short_row.end(), [](char c) { return c != 0; });
  return sets;
}

Eigen::SparseMatrix<int> symmetric_adjacency(const std::vector<std::vector<int>>& lists) {
  const int p = static_cast<int>(lists.size());
  std::vector<Eigen::Triplet<int>> triplets;
  for (int i = 0; i < p; ++i)
    for (int j : lists[i]) {
      triplets.emplace_back(i, j, 1);
      triplets.emplace_back(j, i, 1);
    }
  Eigen::SparseMatrix<int> adj(p, p);
  // Duplicates (mutual neighbours) collapse to 1 rather than summing.
  adj.setFromTriplets(triplets.begin(), triplets.end(), [](int, int) { return 1; });
  return adj;
}

AffinityGraph build_affinity(const NeighborSets& sets, const Labels& labels) {
  const int p = static_cast<int>(sets.within.size());
  if (static_cast<int>(sets.between.size()) != p || static_cast<int>(labels.size()) != p)
    throw DataError("build_affinity: neighbour sets and labels disagree in size");
  for (int i = 0; i < p; ++i) {
    for (int j : sets.within[i])
      if (j == i || labels[j] != labels[i])
        throw DataError("build_affinity: within-class list of sample " + std::to_string(i) +
                        " is inconsistent with labels");
    for (int j : sets.between[i])
      if (labels[j] == labels[i])
        throw DataError("build_affinity: between-class list of sample " + std::to_string(i) +
                        " is inconsistent with labels");
  }
  const Eigen::SparseMatrix<int> gw = symmetric_adjacency(sets.within);
  const Eigen::SparseMatrix<int> gb = symmetric_adjacency(sets.between);
  AffinityGraph graph;
  graph.entries = (gw - gb).pruned();
  graph.entries.makeCompressed();
  graph.source = sets;
  return graph;
}

Eigen::MatrixXd graph_laplacian(const Eigen::SparseMatrix<int>& adjacency) {
  Eigen::MatrixXd a = adjacency.cast<double>();
  Eigen::MatrixXd l = -a;
  l.diagonal() += a.rowwise().sum();
  return l;
}

Eigen::MatrixXd signed_laplacian(const AffinityGraph& graph) { return graph_laplacian(graph.entries); }

void write_matrix_market(const AffinityGraph& graph, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << graph.size() << ' ' << graph.size() << ' ' << graph.entries.nonZeros() << '\n';
  for (int k = 0; k < graph.entries.outerSize(); ++k)
    for (Eigen::SparseMatrix<int>::InnerIterator it(graph.entries, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(const AffinityGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_matrix_market(graph, out);
}

}  // namespace geomap
