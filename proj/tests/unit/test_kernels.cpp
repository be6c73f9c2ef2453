#include <doctest.h>

#include <omp.h>

#include "geomap/kernels.hpp"
#include "test_util.hpp"

using namespace geomap;

TEST_CASE("parallel distances match the serial reference bitwise") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::MatrixXd a = testing::random_matrix(13, 57, seed);
    const Eigen::MatrixXd b = testing::random_matrix(13, 21, seed + 10);
    for (int threads : {1, 3}) {
      omp_set_num_threads(threads);
      CHECK(parallel::pairwise_sq_distances(a) == serial::pairwise_sq_distances(a));
      CHECK(parallel::cross_sq_distances(a, b) == serial::cross_sq_distances(a, b));
    }
  }
}

TEST_CASE("serial distances against direct evaluation") {
  const Eigen::MatrixXd x = testing::random_matrix(4, 9, 8);
  const Eigen::MatrixXd d = serial::pairwise_sq_distances(x);
  for (int i = 0; i < 9; ++i) {
    CHECK(d(i, i) == 0.0);
    for (int j = 0; j < 9; ++j) {
      CHECK(d(i, j) == d(j, i));
      CHECK(d(i, j) == doctest::Approx((x.col(i) - x.col(j)).squaredNorm()).epsilon(1e-14));
    }
  }
}

TEST_CASE("graph scatter agrees across implementations and with X L X^T") {
  const Eigen::MatrixXd x = testing::random_matrix(7, 30, 4);
  Eigen::MatrixXd l = testing::random_matrix(30, 30, 5);
  l = (l + l.transpose()).eval();
  const Eigen::MatrixXd dense = x * l * x.transpose();
  const Eigen::MatrixXd s = serial::graph_scatter(x, l);
  const Eigen::MatrixXd p = parallel::graph_scatter(x, l);
  CHECK((s - dense).norm() <= 1e-12 * dense.norm());
  CHECK((p - dense).norm() <= 1e-12 * dense.norm());
  CHECK(p == p.transpose());
  CHECK(s == s.transpose());
  omp_set_num_threads(1);
  const Eigen::MatrixXd p1 = parallel::graph_scatter(x, l);
  omp_set_num_threads(4);
  CHECK(parallel::graph_scatter(x, l) == p1);
}

TEST_CASE("rbf gram") {
  const Eigen::MatrixXd a = testing::random_matrix(3, 6, 9);
  const Eigen::MatrixXd b = testing::random_matrix(3, 4, 10);
  const Eigen::MatrixXd k = parallel::rbf_gram(a, b, 0.7);
  CHECK((k - serial::rbf_gram(a, b, 0.7)).cwiseAbs().maxCoeff() <= 1e-15);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) CHECK(k(i, j) == doctest::Approx(std::exp(-0.7 * (a.col(i) - b.col(j)).squaredNorm())));
  const Eigen::MatrixXd self = parallel::rbf_gram(a, a, 0.7);
  CHECK(self.diagonal().isOnes());
}
