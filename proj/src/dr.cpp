#include "geomap/dr.hpp"

#include <algorithm>
#include <cmath>

#include "geomap/affinity.hpp"
#include "geomap/errors.hpp"
#include "geomap/kernels.hpp"

namespace geomap {

std::string to_string(DrKind kind) {
  switch (kind) {
    case DrKind::PCA: return "pca";
    case DrKind::LDA: return "lda";
    case DrKind::KPCA: return "kpca";
    case DrKind::MFA: return "mfa";
  }
  return "unknown";
}

DrKind parse_dr_kind(const std::string& name) {
  if (name == "pca") return DrKind::PCA;
  if (name == "lda") return DrKind::LDA;
  if (name == "kpca") return DrKind::KPCA;
  if (name == "mfa") return DrKind::MFA;
  throw ConfigError("unknown DR method '" + name + "' (expected pca, lda, kpca or mfa)");
}

void fix_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i)
      if (std::abs(columns(i, j)) > best) {
        best = std::abs(columns(i, j));
        arg = i;
      }
    if (columns.rows() > 0 && columns(arg, j) < 0.0) columns.col(j) = -columns.col(j);
  }
}

int max_dr_dim(DrKind kind, int dim, int samples, int classes) {
  switch (kind) {
    case DrKind::PCA:
    case DrKind::MFA: return dim;
    case DrKind::LDA: return classes - 1;
    case DrKind::KPCA: return samples;
  }
  return 0;
}

namespace {

void check_dim(DrKind kind, int d, int limit) {
  if (d < 1 || d > limit)
    throw ConfigError(to_string(kind) + ": requested " + std::to_string(d) + " dimensions, allowed 1.." +
                      std::to_string(limit));
}

double tikhonov(const Eigen::MatrixXd& s) {
  const double eps = 1e-6 * s.trace() / static_cast<double>(s.rows());
  return eps > 0.0 ? eps : 1e-6;
}

// Largest-first generalized eigenvectors of a u = lambda b u, unit-norm columns.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> top_generalized(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                            int d) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, b);
  if (eig.info() != Eigen::Success) throw NumericalError("generalized eigensolver failed");
  const auto n = a.rows();
  Eigen::MatrixXd vecs(n, d);
  Eigen::VectorXd vals(d);
  for (int k = 0; k < d; ++k) {
    vecs.col(k) = eig.eigenvectors().col(n - 1 - k).normalized();
    vals(k) = eig.eigenvalues()(n - 1 - k);
  }
  fix_signs(vecs);
  return {vecs, vals};
}

int class_count_of(const Labels& labels) {
  int c = 0;
  for (int y : labels) c = std::max(c, y);
  return c;
}

}  // namespace

DrModel fit_pca(const Eigen::MatrixXd& x, int d) {
  const int n = static_cast<int>(x.rows());
  check_dim(DrKind::PCA, d, n);
  if (x.cols() < 2) throw DataError("pca: need at least two samples");
  DrModel model;
  model.kind = DrKind::PCA;
  model.input_dim = n;
  model.out_dim = d;
  model.center = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - model.center;
  const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(x.cols() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("pca: eigensolver failed");
  model.basis = eig.eigenvectors().rightCols(d).rowwise().reverse();
  model.eigenvalues = eig.eigenvalues().tail(d).reverse();
  fix_signs(model.basis);
  return model;
}

DrModel fit_lda(const Eigen::MatrixXd& x, const Labels& labels, int d) {
  const int n = static_cast<int>(x.rows());
  const int c = class_count_of(labels);
  if (c < 2) throw DataError("lda: need at least two classes");
  check_dim(DrKind::LDA, d, c - 1);
  DrModel model;
  model.kind = DrKind::LDA;
  model.input_dim = n;
  model.out_dim = d;
  model.center = x.rowwise().mean();

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(n, c);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(c);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    means.col(labels[j] - 1) += x.col(j);
    ++counts(labels[j] - 1);
  }
  for (int k = 0; k < c; ++k)
    if (counts(k) > 0) means.col(k) /= counts(k);
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd r = x.col(j) - means.col(labels[j] - 1);
    sw.noalias() += r * r.transpose();
  }
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < c; ++k) {
    const Eigen::VectorXd r = means.col(k) - model.center;
    sb.noalias() += counts(k) * r * r.transpose();
  }
  // Train sets are far smaller than the band count, so S_w is always singular.
  double eps = tikhonov(sw);
  if (sw.trace() == 0.0) eps = tikhonov(sb);
  sw.diagonal().array() += eps;
  std::tie(model.basis, model.eigenvalues) = top_generalized(sb, sw, d);
  return model;
}

DrModel fit_kpca(const Eigen::MatrixXd& x, int d, double gamma) {
  const int p = static_cast<int>(x.cols());
  if (!(gamma > 0.0)) throw ConfigError("kpca: gamma must be positive");
  check_dim(DrKind::KPCA, d, p);
  DrModel model;
  model.kind = DrKind::KPCA;
  model.input_dim = static_cast<int>(x.rows());
  model.out_dim = d;
  model.gamma = gamma;
  model.train_samples = x;

  const Eigen::MatrixXd k = parallel::rbf_gram(x, x, gamma);
  model.gram_col_means = k.colwise().mean().transpose();
  model.gram_mean = k.mean();
  Eigen::MatrixXd kc = k;
  kc.rowwise() -= model.gram_col_means.transpose();
  kc.colwise() -= model.gram_col_means;
  kc.array() += model.gram_mean;
  kc = 0.5 * (kc + kc.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kc);
  if (eig.info() != Eigen::Success) throw NumericalError("kpca: eigensolver failed");
  Eigen::MatrixXd vecs = eig.eigenvectors().rightCols(d).rowwise().reverse();
  fix_signs(vecs);
  model.eigenvalues = eig.eigenvalues().tail(d).reverse();
  model.coefficients.resize(p, d);
  const double floor = 1e-12 * std::max(1.0, static_cast<double>(p));
  for (int j = 0; j < d; ++j) {
    const double lambda = model.eigenvalues(j);
    if (lambda > floor) {
      model.coefficients.col(j) = vecs.col(j) / std::sqrt(lambda);
    } else {
      model.coefficients.col(j).setZero();
      model.degenerate = true;
    }
  }
  model.train_scores = model.coefficients.transpose() * kc;
  return model;
}

DrModel fit_mfa(const Eigen::MatrixXd& x, const Labels& labels, int d, int k1, int k2) {
  const int n = static_cast<int>(x.rows());
  check_dim(DrKind::MFA, d, n);
  if (k1 < 1 || k2 < 1) throw ConfigError("mfa: k1 and k2 must be >= 1");
  DrModel model;
  model.kind = DrKind::MFA;
  model.input_dim = n;
  model.out_dim = d;
  model.center = Eigen::VectorXd::Zero(n);

  const NeighborSets sets = neighbor_sets(x, labels, k1, k2);
  const Eigen::MatrixXd intrinsic = parallel::graph_scatter(x, graph_laplacian(symmetric_adjacency(sets.within)));
  const Eigen::MatrixXd penalty = parallel::graph_scatter(x, graph_laplacian(symmetric_adjacency(sets.between)));
  Eigen::MatrixXd reg = intrinsic;
  reg.diagonal().array() += tikhonov(intrinsic);
  std::tie(model.basis, model.eigenvalues) = top_generalized(penalty, reg, d);
  return model;
}

Eigen::MatrixXd apply_dr(const DrModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.input_dim)
    throw DataError(to_string(model.kind) + ": model trained on " + std::to_string(model.input_dim) +
                    "-dimensional data, got " + std::to_string(x.rows()));
  if (model.kind != DrKind::KPCA) return model.basis.transpose() * (x.colwise() - model.center);
  Eigen::MatrixXd kx = parallel::rbf_gram(model.train_samples, x, model.gamma);  // p x q
  const Eigen::RowVectorXd new_means = kx.colwise().mean();
  kx.colwise() -= model.gram_col_means;
  kx.rowwise() -= new_means;
  kx.array() += model.gram_mean;
  return model.coefficients.transpose() * kx;
}

}  // namespace geomap
