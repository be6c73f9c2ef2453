#include "geomap/stiefel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "geomap/errors.hpp"
#include "geomap/rng.hpp"

namespace geomap {

namespace {

constexpr double kAcceptDefect = 1e-10;
constexpr double kRepairDefect = 1e-6;

double defect(const Eigen::MatrixXd& u) {
  const auto m = u.cols();
  return (u.transpose() * u - Eigen::MatrixXd::Identity(m, m)).norm();
}

}  // namespace

Eigen::MatrixXd qf(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  const auto m = a.cols();
  if (m > n) throw DataError("qf: more columns than rows");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  const Eigen::MatrixXd& r = qr.matrixQR();
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  for (Eigen::Index k = 0; k < m; ++k) {
    const double rkk = r(k, k);
    if (!(std::abs(rkk) > 1e-13 * scale))
      throw NumericalError("qf: rank-deficient input (|R(" + std::to_string(k) + "," + std::to_string(k) +
                           ")| = " + std::to_string(std::abs(rkk)) + ")");
    if (rkk < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

OrthonormalFrame::OrthonormalFrame(Eigen::MatrixXd u) : u_(std::move(u)) {
  if (u_.cols() < 1 || u_.cols() > u_.rows())
    throw DataError("frame must be n x m with 1 <= m <= n, got " + std::to_string(u_.rows()) + " x " +
                    std::to_string(u_.cols()));
  if (!u_.allFinite()) throw NumericalError("frame contains non-finite entries");
  const double d = defect(u_);
  if (d <= kAcceptDefect) return;
  if (d > kRepairDefect)
    throw NumericalError("matrix is not orthonormal (||U^T U - I||_F = " + std::to_string(d) + ")");
  u_ = qf(u_);
}

double OrthonormalFrame::orthonormality_defect() const { return defect(u_); }

OrthonormalFrame random_frame(int n, int m, std::uint64_t seed) {
  if (m < 1 || m > n)
    throw ConfigError("random_frame: need 1 <= m <= n, got n=" + std::to_string(n) + ", m=" + std::to_string(m));
  Xoshiro256 rng(seed);
  Eigen::MatrixXd g(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  return OrthonormalFrame(qf(g));
}

TangentVector project_tangent(const OrthonormalFrame& u, const Eigen::MatrixXd& g) {
  const auto& um = u.matrix();
  if (g.rows() != um.rows() || g.cols() != um.cols())
    throw DataError("project_tangent: shape mismatch");
  return {g - um * (um.transpose() * g)};
}

OrthonormalFrame retract(const OrthonormalFrame& u, const TangentVector& xi, double step) {
  if (xi.matrix.rows() != u.rows() || xi.matrix.cols() != u.cols())
    throw DataError("retract: shape mismatch");
  if (step == 0.0) return u;
  return OrthonormalFrame(qf(u.matrix() + step * xi.matrix));
}

TangentVector transport(const OrthonormalFrame& to, const TangentVector& xi) {
  return project_tangent(to, xi.matrix);
}

void CgOptions::validate() const {
  if (max_iters < 0) throw ConfigError("cg.max_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw ConfigError("cg.grad_tol must be positive");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw ConfigError("cg.armijo_c1 must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
    throw ConfigError("cg.backtrack_factor must lie in (0, 1)");
  if (max_backtracks < 1) throw ConfigError("cg.max_backtracks must be >= 1");
  if (!(initial_step > 0.0)) throw ConfigError("cg.initial_step must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "grad_tol";
    case Termination::MaxIters: return "max_iters";
    case Termination::LineSearchFail: return "line_search_fail";
  }
  return "unknown";
}

namespace {

struct Point {
  OrthonormalFrame frame;
  double cost;
  TangentVector grad;
  double grad_norm;
};

Point evaluate(const CostFn& cost, const EuclideanGradFn& egrad, OrthonormalFrame frame, int iter) {
  const double f = cost(frame);
  if (!std::isfinite(f)) throw NumericalError("non-finite cost at iteration " + std::to_string(iter));
  const Eigen::MatrixXd e = egrad(frame);
  if (!e.allFinite()) throw NumericalError("non-finite gradient at iteration " + std::to_string(iter));
  TangentVector g = project_tangent(frame, e);
  const double gn = g.matrix.norm();
  return {std::move(frame), f, std::move(g), gn};
}

}  // namespace

OptResult minimize_cg(const CostFn& cost, const EuclideanGradFn& egrad, const OrthonormalFrame& start,
                      const CgOptions& opts, const IterationObserver& observer) {
  opts.validate();
  Point cur = evaluate(cost, egrad, start, 0);
  OptResult result;
  result.cost_trace.push_back(cur.cost);
  if (observer) observer({0, cur.frame, cur.grad, cur.cost, cur.grad_norm, 0.0});

  TangentVector dir{-cur.grad.matrix};
  double prev_cost = std::numeric_limits<double>::quiet_NaN();
  int iter = 0;
  Termination why = Termination::MaxIters;

  for (;;) {
    if (cur.grad_norm <= opts.grad_tol) {
      why = Termination::GradTol;
      break;
    }
    if (iter >= opts.max_iters) {
      why = Termination::MaxIters;
      break;
    }

    double slope = inner(cur.grad, dir);
    bool steepest = false;
    if (!(slope < 0.0)) {
      dir.matrix = -cur.grad.matrix;
      slope = -cur.grad_norm * cur.grad_norm;
      steepest = true;
    }

    // Armijo backtracking; a failed CG direction gets one retry as steepest descent.
    bool accepted = false;
    double step = 0.0;
    for (;;) {
      const double dnorm = dir.matrix.norm();
      double t = opts.initial_step / dnorm;
      if (std::isfinite(prev_cost)) {
        const double guess = 2.0 * (cur.cost - prev_cost) / slope;
        if (std::isfinite(guess) && guess > 0.0) t = guess;
      }
      for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= opts.backtrack_factor) {
        OrthonormalFrame trial_frame;
        try {
          trial_frame = retract(cur.frame, dir, t);
        } catch (const NumericalError&) {
          continue;  // rank-deficient trial point: shrink
        }
        const double f = cost(trial_frame);
        if (!std::isfinite(f)) continue;
        if (f < cur.cost && f <= cur.cost + opts.armijo_c1 * t * slope) {
          Point next = evaluate(cost, egrad, std::move(trial_frame), iter + 1);
          const TangentVector g_old = transport(next.frame, cur.grad);
          const TangentVector d_old = transport(next.frame, dir);
          const double beta =
              std::max(0.0, inner(next.grad, TangentVector{next.grad.matrix - g_old.matrix}) /
                                (cur.grad_norm * cur.grad_norm));
          dir.matrix = -next.grad.matrix + beta * d_old.matrix;
          prev_cost = cur.cost;
          cur = std::move(next);
          step = t;
          accepted = true;
          break;
        }
      }
      if (accepted || steepest) break;
      dir.matrix = -cur.grad.matrix;
      slope = -cur.grad_norm * cur.grad_norm;
      prev_cost = std::numeric_limits<double>::quiet_NaN();
      steepest = true;
    }
    if (!accepted) {
      why = Termination::LineSearchFail;
      break;
    }
    ++iter;
    result.cost_trace.push_back(cur.cost);
    if (observer) observer({iter, cur.frame, cur.grad, cur.cost, cur.grad_norm, step});
  }

  result.frame = std::move(cur.frame);
  result.cost = cur.cost;
  result.grad_norm = cur.grad_norm;
  result.iterations = iter;
  result.termination = why;
  return result;
}

IterationObserver make_iteration_logger(std::ostream& out) {
  return [&out](const IterationInfo& info) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", info.iteration, info.cost, info.grad_norm,
                  info.step);
    out << buf;
  };
}

}  // namespace geomap
