#include "geomap/kernels.hpp"

#include <cmath>

#include "geomap/errors.hpp"

namespace geomap {

namespace {

inline double sq_dist(const double* a, const double* b, Eigen::Index n) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

void check_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows())
    throw DataError(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) +
                    " vs " + std::to_string(b.rows()) + ")");
}

void check_laplacian(const Eigen::MatrixXd& x, const Eigen::MatrixXd& l) {
  if (l.rows() != x.cols() || l.cols() != x.cols())
    throw DataError("graph_scatter: laplacian must be p x p with p = sample count");
}

}  // namespace

namespace serial {

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x) { return cross_sq_distances(x, x); }

Eigen::MatrixXd cross_sq_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  check_rows(a, b, "cross_sq_distances");
  Eigen::MatrixXd d(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      d(i, j) = sq_dist(a.col(i).data(), b.col(j).data(), a.rows());
  return d;
}

Eigen::MatrixXd graph_scatter(const Eigen::MatrixXd& x, const Eigen::MatrixXd& laplacian) {
  check_laplacian(x, laplacian);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      const double w = laplacian(i, j);
      if (w == 0.0) continue;
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index a = 0; a < n; ++a) m(a, b) += w * x(a, i) * x(b, j);
    }
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
  Eigen::MatrixXd k = cross_sq_distances(a, b);
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    for (Eigen::Index i = 0; i < k.rows(); ++i) k(i, j) = std::exp(-gamma * k(i, j));
  return k;
}

}  // namespace serial

namespace parallel {

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index p = x.cols();
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d(p, p);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index j = 0; j < p; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < p; ++i) d(i, j) = sq_dist(x.col(i).data(), x.col(j).data(), n);
  }
  // sq_dist(a, b) == sq_dist(b, a) bitwise, so mirroring is exact.
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < j; ++i) d(i, j) = d(j, i);
  return d;
}

Eigen::MatrixXd cross_sq_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  check_rows(a, b, "cross_sq_distances");
  Eigen::MatrixXd d(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      d(i, j) = sq_dist(a.col(i).data(), b.col(j).data(), a.rows());
  return d;
}

Eigen::MatrixXd graph_scatter(const Eigen::MatrixXd& x, const Eigen::MatrixXd& laplacian) {
  check_laplacian(x, laplacian);
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  // lx(:, b) = L * x(b, :)^T
  Eigen::MatrixXd lx(p, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index i = 0; i < p; ++i) {
      double s = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) s += laplacian(i, j) * x(b, j);
      lx(i, b) = s;
    }
  Eigen::MatrixXd m(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < n; ++b)
    for (Eigen::Index a = 0; a < n; ++a) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < p; ++i) s += x(a, i) * lx(i, b);
      m(a, b) = s;
    }
  return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double gamma) {
  check_rows(a, b, "rbf_gram");
  Eigen::MatrixXd k(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      k(i, j) = std::exp(-gamma * sq_dist(a.col(i).data(), b.col(j).data(), a.rows()));
  return k;
}

}  // namespace parallel

}  // namespace geomap
