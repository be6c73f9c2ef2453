#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace geomap {

/// n x m matrix with orthonormal columns (m <= n).
class OrthonormalFrame {
 public:
  OrthonormalFrame() = default;

  /// Accepts ||U^T U - I||_F <= 1e-10 as is, re-orthonormalizes (QR with a
  /// positive R diagonal) when the defect is at most 1e-6, rejects otherwise.
  explicit OrthonormalFrame(Eigen::MatrixXd u);

  const Eigen::MatrixXd& matrix() const noexcept { return u_; }
  int rows() const noexcept { return static_cast<int>(u_.rows()); }
  int cols() const noexcept { return static_cast<int>(u_.cols()); }

  /// ||U^T U - I||_F
  double orthonormality_defect() const;

 private:
  Eigen::MatrixXd u_;
};

/// Horizontal tangent direction at some frame: U^T xi = 0.
struct TangentVector {
  Eigen::MatrixXd matrix;
};

inline double inner(const TangentVector& a, const TangentVector& b) {
  return (a.matrix.array() * b.matrix.array()).sum();
}

/// Thin QR with the sign of each column chosen so diag(R) > 0.
/// Throws NumericalError when a diagonal entry of R vanishes (rank deficiency).
Eigen::MatrixXd qf(const Eigen::MatrixXd& a);

/// Seeded standard-normal n x m matrix, orthonormalized by qf.
OrthonormalFrame random_frame(int n, int m, std::uint64_t seed);

/// (I - U U^T) G
TangentVector project_tangent(const OrthonormalFrame& u, const Eigen::MatrixXd& g);

/// qf(U + t xi); t == 0 returns U unchanged.
OrthonormalFrame retract(const OrthonormalFrame& u, const TangentVector& xi, double step);

/// Projection-based vector transport onto the tangent space at `to`.
TangentVector transport(const OrthonormalFrame& to, const TangentVector& xi);

struct CgOptions {
  int max_iters = 500;
  double grad_tol = 1e-6;  // on the Riemannian gradient Frobenius norm
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 50;
  double initial_step = 1.0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  bool operator==(const CgOptions&) const = default;
};

enum class Termination { GradTol, MaxIters, LineSearchFail };

std::string to_string(Termination t);

struct OptResult {
  OrthonormalFrame frame;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> cost_trace;  // initial cost, then one entry per accepted step
  Termination termination = Termination::MaxIters;
};

/// State handed to an observer at every iterate, including the first.
struct IterationInfo {
  int iteration;
  const OrthonormalFrame& frame;
  const TangentVector& riemannian_gradient;
  double cost;
  double grad_norm;
  double step;  // accepted step size, 0 for the initial point
};

using CostFn = std::function<double(const OrthonormalFrame&)>;
using EuclideanGradFn = std::function<Eigen::MatrixXd(const OrthonormalFrame&)>;
using IterationObserver = std::function<void(const IterationInfo&)>;

/// Riemannian conjugate gradient (Polak-Ribiere+, restarted whenever the
/// direction is not a descent direction) with Armijo backtracking.
///
/// The first trial step is initial_step / ||d||, i.e. a move of length
/// initial_step in the ambient space. Later iterations start from the
/// quadratic-interpolation guess 2 (f_k - f_{k-1}) / <g_k, d_k> and fall back
/// to the first rule when that guess is not positive and finite.
///
/// Throws NumericalError if the cost or gradient becomes non-finite.
OptResult minimize_cg(const CostFn& cost, const EuclideanGradFn& egrad, const OrthonormalFrame& start,
                      const CgOptions& opts, const IterationObserver& observer = {});

/// Observer that writes "iter,cost,grad_norm,step" lines.
IterationObserver make_iteration_logger(std::ostream& out);

}  // namespace geomap
