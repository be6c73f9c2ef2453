#pragma once

#include <string>

#include <Eigen/Dense>

#include "geomap/dataset.hpp"

namespace geomap {

enum class DrKind { PCA, LDA, KPCA, MFA };

std::string to_string(DrKind kind);
DrKind parse_dr_kind(const std::string& name);

/// A fitted dimensionality reduction. Linear methods use `basis` (input_dim x
/// out_dim) and `center`; KPCA keeps the training samples and the centering
/// terms of its Gram matrix.
struct DrModel {
  DrKind kind = DrKind::PCA;
  int input_dim = 0;
  int out_dim = 0;
  Eigen::MatrixXd basis;
  Eigen::VectorXd center;
  Eigen::VectorXd eigenvalues;  // leading eigenvalues, descending

  // KPCA only
  Eigen::MatrixXd train_samples;
  double gamma = 0.0;
  Eigen::VectorXd gram_col_means;  // mean of each Gram column
  double gram_mean = 0.0;
  Eigen::MatrixXd coefficients;    // p x d, eigenvectors scaled by 1/sqrt(lambda)
  Eigen::MatrixXd train_scores;    // d x p
  bool degenerate = false;         // some retained eigenvalue was ~0
};

/// Makes the largest-magnitude entry of each column positive (first such
/// entry on exact magnitude ties).
void fix_signs(Eigen::MatrixXd& columns);

DrModel fit_pca(const Eigen::MatrixXd& x, int d);

/// Fisher LDA on S_b u = lambda (S_w + eps I) u with eps = 1e-6 trace(S_w) / n.
DrModel fit_lda(const Eigen::MatrixXd& x, const Labels& labels, int d);

/// RBF kernel PCA, k(x, y) = exp(-gamma ||x - y||^2). gamma <= 0 is an error;
/// pass 1/n for the conventional default.
DrModel fit_kpca(const Eigen::MatrixXd& x, int d, double gamma);

/// Marginal Fisher analysis with intrinsic graph from k1 within-class
/// neighbours and penalty graph from k2 between-class neighbours.
DrModel fit_mfa(const Eigen::MatrixXd& x, const Labels& labels, int d, int k1 = 9, int k2 = 9);

/// Projects columns of `x` (input_dim rows) to out_dim rows.
Eigen::MatrixXd apply_dr(const DrModel& model, const Eigen::MatrixXd& x);

/// Upper bound on d for a method given training data shape.
int max_dr_dim(DrKind kind, int dim, int samples, int classes);

}  // namespace geomap
