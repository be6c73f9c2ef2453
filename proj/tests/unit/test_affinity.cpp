#include <doctest.h>

#include <sstream>

#include "geomap/affinity.hpp"
#include "geomap/errors.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace geomap;

namespace {

Eigen::MatrixXd line(std::initializer_list<double> values) {
  Eigen::MatrixXd x(1, values.size());
  int j = 0;
  for (double v : values) x(0, j++) = v;
  return x;
}

}  // namespace

TEST_CASE("neighbor_sets: single pair") {
  const auto sets = neighbor_sets(line({0.0, 1.0}), Labels{1, 1}, 1, 1);
  CHECK(sets.within[0] == std::vector<int>{1});
  CHECK(sets.within[1] == std::vector<int>{0});
  CHECK(sets.between[0].empty());
  CHECK(sets.between[1].empty());
}

TEST_CASE("neighbor_sets and build_affinity: alternating four points") {
  const Labels y{1, 2, 1, 2};
  const auto sets = neighbor_sets(line({0.0, 1.0, 2.0, 3.0}), y, 1, 1);
  CHECK(sets.within == std::vector<std::vector<int>>{{2}, {3}, {0}, {1}});
  // Sample 2 (x=2) is at distance 1 from both 1 and 3; the lower index wins.
  CHECK(sets.between == std::vector<std::vector<int>>{{1}, {0}, {1}, {2}});
  CHECK_FALSE(sets.truncated);

  const Eigen::MatrixXd a = build_affinity(sets, y).dense();
  Eigen::MatrixXd expected(4, 4);
  expected << 0, -1, 1, 0,
             -1, 0, -1, 1,
              1, -1, 0, -1,
              0, 1, -1, 0;
  CHECK(a == expected);
}

TEST_CASE("two same-class points give a positive edge") {
  LabeledDataset ds(line({0.0, 1.0, 5.0}), {1, 1, 2}, 2);
  const auto g = build_affinity(neighbor_sets(ds, 1, 1), ds.labels());
  CHECK(g.entries.coeff(0, 1) == 1);
  CHECK(g.entries.coeff(1, 0) == 1);
}

TEST_CASE("singleton class truncates") {
  LabeledDataset ds(line({0.0, 1.0, 2.0, 7.0}), {1, 1, 1, 2}, 2);
  const auto sets = neighbor_sets(ds, 5, 1);
  CHECK(sets.within[3].empty());
  CHECK(sets.within[0].size() == 2);
  CHECK(sets.truncated);
}

TEST_CASE("neighbor_sets rejects bad counts and single-class data") {
  LabeledDataset ds(line({0.0, 1.0, 2.0}), {1, 2, 1}, 2);
  CHECK_THROWS_AS(neighbor_sets(ds, 0, 1), ConfigError);
  LabeledDataset one(line({0.0, 1.0}), {1, 1}, 1);
  CHECK_THROWS_AS(neighbor_sets(one, 1, 1), DataError);
}

TEST_CASE("build_affinity rejects inconsistent neighbour sets") {
  NeighborSets sets;
  sets.within = {{1}, {0}};
  sets.between = {{}, {}};
  CHECK_THROWS_AS(build_affinity(sets, Labels{1, 2}), DataError);
}

TEST_CASE("affinity matches brute-force enumeration") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int p = 10 + static_cast<int>(seed % 30);
    const int c = 2 + static_cast<int>(seed % 4);
    auto ds = testing::random_labeled(3, p, c, 300 + seed);
    if (seed % 3 == 0) {
      // Integer coordinates create distance ties.
      ds = ds.with_features(ds.features().array().round().matrix());
    }
    const int v = 1 + static_cast<int>(seed % 7);
    const auto g = build_affinity(neighbor_sets(ds, v, v + 1), ds.labels());
    const Eigen::MatrixXi ref = oracle::affinity(ds.features(), ds.labels(), v, v + 1);
    REQUIRE(Eigen::MatrixXi(g.entries) == ref);
  }
}

TEST_CASE("affinity structural invariants") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = testing::random_labeled(4, 31, 3, 40 + seed);
    const auto sets = neighbor_sets(ds, 4, 6);
    const Eigen::MatrixXi a(build_affinity(sets, ds.labels()).entries);
    CHECK(a == a.transpose());
    CHECK(a.diagonal().isZero());
    const auto sizes = ds.class_sizes();
    for (int i = 0; i < 31; ++i) {
      const int same = sizes[ds.labels()[i] - 1] - 1;
      CHECK(static_cast<int>(sets.within[i].size()) == std::min(4, same));
      CHECK(static_cast<int>(sets.between[i].size()) == std::min(6, 31 - same - 1));
      for (int j = 0; j < 31; ++j) {
        REQUIRE(std::abs(a(i, j)) <= 1);
        if (a(i, j) > 0) REQUIRE(ds.labels()[i] == ds.labels()[j]);
        if (a(i, j) < 0) REQUIRE(ds.labels()[i] != ds.labels()[j]);
      }
    }
  }
}

TEST_CASE("affinity is permutation equivariant") {
  const auto ds = testing::random_labeled(3, 24, 3, 77);
  std::vector<int> perm(24);
  for (int j = 0; j < 24; ++j) perm[j] = (j * 7 + 3) % 24;
  const auto permuted = ds.subset(perm);
  const Eigen::MatrixXi a(build_affinity(neighbor_sets(ds, 3, 3), ds.labels()).entries);
  const Eigen::MatrixXi b(build_affinity(neighbor_sets(permuted, 3, 3), permuted.labels()).entries);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j) REQUIRE(b(i, j) == a(perm[i], perm[j]));
}

TEST_CASE("signed laplacian") {
  AffinityGraph g;
  g.entries.resize(2, 2);
  g.entries.insert(0, 1) = 1;
  g.entries.insert(1, 0) = 1;
  Eigen::Matrix2d expected;
  expected << 1, -1, -1, 1;
  CHECK(signed_laplacian(g) == expected);
  g.entries.coeffRef(0, 1) = -1;
  g.entries.coeffRef(1, 0) = -1;
  CHECK(signed_laplacian(g) == -expected);
}

TEST_CASE("laplacian quadratic form equals half the weighted pair sum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Xoshiro256 rng(seed);
    AffinityGraph g;
    g.entries.resize(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) {
        const int v = static_cast<int>(rng.below(3)) - 1;
        if (v != 0) {
          g.entries.insert(i, j) = v;
          g.entries.insert(j, i) = v;
        }
      }
    const Eigen::VectorXd x = testing::random_matrix(6, 1, seed + 50);
    const Eigen::MatrixXd a = g.dense();
    double half_sum = 0.0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) half_sum += 0.5 * a(i, j) * (x(i) - x(j)) * (x(i) - x(j));
    CHECK(x.dot(signed_laplacian(g) * x) == doctest::Approx(half_sum).epsilon(1e-12));
  }
}

TEST_CASE("matrix market export") {
  const Labels y{1, 2, 1, 2};
  const auto g = build_affinity(neighbor_sets(line({0.0, 1.0, 2.0, 3.0}), y, 1, 1), y);
  std::ostringstream out;
  write_matrix_market(g, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "%%MatrixMarket matrix coordinate integer general");
  int rows, cols, nnz;
  in >> rows >> cols >> nnz;
  CHECK(rows == 4);
  CHECK(cols == 4);
  CHECK(nnz == 10);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(4, 4);
  for (int k = 0; k < nnz; ++k) {
    int i, j, v;
    in >> i >> j >> v;
    back(i - 1, j - 1) = v;
  }
  CHECK(back == Eigen::MatrixXi(g.entries));
}
