#pragma once

#include <Eigen/Dense>

// Dense data-parallel kernels. Each kernel has a plain serial reference in
// `geomap::serial` and an OpenMP version in `geomap::parallel`; the library
// calls the parallel ones, tests check them against the references and the
// benchmark target times both.
//
// All samples are columns.

namespace geomap {

namespace serial {

/// D(i, j) = ||x_i - x_j||^2, accumulated band by band in index order.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x);

/// D(i, j) = ||a_i - b_j||^2.
Eigen::MatrixXd cross_sq_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// X L X^T as the explicit pair sum sum_ij L_ij x_i x_j^T, symmetrized.
Eigen::MatrixXd graph_scatter(const Eigen::MatrixXd& x, const Eigen::MatrixXd& laplacian);

/// K(i, j) = exp(-gamma ||a_i - b_j||^2).
Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

}  // namespace serial

namespace parallel {

// Distances are bitwise identical to the serial versions for any thread
// count: each entry is owned by one thread and summed in the same order.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x);
Eigen::MatrixXd cross_sq_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Two-stage product (L X^T, then X times it), parallel over output columns.
// Deterministic for any thread count; agrees with the serial pair sum to
// rounding.
Eigen::MatrixXd graph_scatter(const Eigen::MatrixXd& x, const Eigen::MatrixXd& laplacian);

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma);

}  // namespace parallel

}  // namespace geomap
