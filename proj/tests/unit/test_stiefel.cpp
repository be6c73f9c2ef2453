#include <doctest.h>

#include <sstream>

#include "geomap/errors.hpp"
#include "geomap/stiefel.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace geomap;

namespace {

double defect(const Eigen::MatrixXd& u) {
  return (u.transpose() * u - Eigen::MatrixXd::Identity(u.cols(), u.cols())).norm();
}

OptResult minimize_quadratic(const Eigen::MatrixXd& m_sym, const OrthonormalFrame& start, CgOptions opts = {},
                             const IterationObserver& observer = {}) {
  return minimize_cg([&](const OrthonormalFrame& u) { return (u.matrix().transpose() * m_sym * u.matrix()).trace(); },
                     [&](const OrthonormalFrame& u) { return Eigen::MatrixXd(2.0 * m_sym * u.matrix()); }, start,
                     opts, observer);
}

}  // namespace

TEST_CASE("random_frame") {
  const auto a = random_frame(3, 3, 17);
  CHECK(defect(a.matrix()) < 1e-12);
  CHECK(random_frame(3, 3, 17).matrix() == a.matrix());
  CHECK(random_frame(3, 3, 18).matrix() != a.matrix());
  CHECK_THROWS_AS(random_frame(2, 3, 1), ConfigError);
  CHECK_THROWS_AS(random_frame(3, 0, 1), ConfigError);
}

TEST_CASE("OrthonormalFrame construction rules") {
  Eigen::MatrixXd u = random_frame(6, 3, 2).matrix();
  CHECK(OrthonormalFrame(u).matrix() == u);
  Eigen::MatrixXd nudged = u;
  nudged(0, 0) += 1e-8;
  const OrthonormalFrame repaired(nudged);
  CHECK(repaired.orthonormality_defect() <= 1e-10);
  nudged(0, 0) += 1e-3;
  CHECK_THROWS_AS(OrthonormalFrame{nudged}, NumericalError);
}

TEST_CASE("qf sign convention and rank deficiency") {
  const Eigen::MatrixXd a = testing::random_matrix(5, 3, 6);
  const Eigen::MatrixXd q = qf(a);
  const Eigen::MatrixXd r = q.transpose() * a;
  CHECK(defect(q) < 1e-12);
  for (int k = 0; k < 3; ++k) CHECK(r(k, k) > 0.0);
  CHECK((q * r - a).norm() < 1e-12 * a.norm());
  Eigen::MatrixXd dep = a;
  dep.col(2) = 2.0 * dep.col(0);
  CHECK_THROWS_AS(qf(dep), NumericalError);
}

TEST_CASE("project_tangent") {
  const auto u = random_frame(5, 2, 3);
  CHECK(project_tangent(u, u.matrix()).matrix.norm() < 1e-14);

  const Eigen::MatrixXd g = testing::random_matrix(5, 2, 4);
  const auto xi = project_tangent(u, g);
  CHECK((u.matrix().transpose() * xi.matrix).norm() < 1e-12);
  CHECK((project_tangent(u, xi.matrix).matrix - xi.matrix).norm() < 1e-12);
  CHECK_THROWS_AS(project_tangent(u, Eigen::MatrixXd::Zero(4, 2)), DataError);
}

TEST_CASE("retract") {
  const auto u = random_frame(5, 2, 8);
  const auto xi = project_tangent(u, testing::random_matrix(5, 2, 9));
  CHECK(retract(u, xi, 0.0).matrix() == u.matrix());
  for (double t : {1e-3, 0.5, 3.0, 100.0}) CHECK(retract(u, xi, t).orthonormality_defect() < 1e-10);

  const OrthonormalFrame e1(Eigen::Vector3d(1, 0, 0));
  const TangentVector e2{Eigen::Vector3d(0, 1, 0)};
  const Eigen::MatrixXd moved = retract(e1, e2, 1.0).matrix();
  CHECK(moved(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(moved(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(moved(2, 0) == 0.0);
}

TEST_CASE("transport") {
  const auto u = random_frame(6, 3, 10);
  const auto xi = project_tangent(u, testing::random_matrix(6, 3, 11));
  CHECK(transport(u, TangentVector{Eigen::MatrixXd::Zero(6, 3)}).matrix.isZero());
  CHECK((transport(u, xi).matrix - xi.matrix).norm() < 1e-12);
  const auto v = retract(u, xi, 0.3);
  CHECK((v.matrix().transpose() * transport(v, xi).matrix).norm() < 1e-10);
}

TEST_CASE("CgOptions validation") {
  CgOptions o;
  CHECK_NOTHROW(o.validate());
  o.armijo_c1 = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.backtrack_factor = 0.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.grad_tol = -1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
}

TEST_CASE("minimize_cg on diagonal quadratics") {
  const Eigen::Matrix3d m = Eigen::Vector3d(1, 2, 3).asDiagonal();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r1 = minimize_quadratic(m, random_frame(3, 1, seed));
    CHECK(r1.cost == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(r1.frame.matrix()(0, 0)) == doctest::Approx(1.0).epsilon(1e-6));
    const auto r2 = minimize_quadratic(m, random_frame(3, 2, seed));
    CHECK(r2.cost == doctest::Approx(3.0).epsilon(1e-6));
  }
}

TEST_CASE("minimize_cg reaches the Ky Fan value on random symmetric matrices") {
  for (std::uint64_t inst = 0; inst < 4; ++inst) {
    Eigen::MatrixXd m = testing::random_matrix(8, 8, 500 + inst);
    m = (m + m.transpose()).eval();
    const double target = oracle::ky_fan_sum(m, 3);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      best = std::min(best, minimize_quadratic(m, random_frame(8, 3, seed)).cost);
    CHECK(std::abs(best - target) <= 1e-6 * std::abs(target));
  }
}

TEST_CASE("minimize_cg iterate invariants") {
  Eigen::MatrixXd m = testing::random_matrix(12, 12, 77);
  m = (m * m.transpose() - 5.0 * Eigen::MatrixXd::Identity(12, 12)).eval();
  double max_defect = 0.0, max_tangency = 0.0;
  int calls = 0;
  const auto r = minimize_quadratic(m, random_frame(12, 4, 1), {}, [&](const IterationInfo& info) {
    ++calls;
    max_defect = std::max(max_defect, info.frame.orthonormality_defect());
    max_tangency = std::max(max_tangency, (info.frame.matrix().transpose() * info.riemannian_gradient.matrix).norm());
  });
  CHECK(max_defect < 1e-10);
  CHECK(max_tangency < 1e-8);
  CHECK(calls == r.iterations + 1);
  CHECK(r.cost_trace.size() == static_cast<std::size_t>(r.iterations + 1));
  CHECK(r.cost == r.cost_trace.back());
  for (std::size_t k = 1; k < r.cost_trace.size(); ++k) CHECK(r.cost_trace[k] < r.cost_trace[k - 1]);
}

TEST_CASE("minimize_cg termination reasons") {
  const Eigen::Matrix3d m = Eigen::Vector3d(1, 2, 3).asDiagonal();
  CgOptions few;
  few.max_iters = 1;
  CHECK(minimize_quadratic(m, random_frame(3, 1, 4), few).termination == Termination::MaxIters);
  const auto at_min = minimize_quadratic(m, OrthonormalFrame(Eigen::Vector3d(1, 0, 0)));
  CHECK(at_min.termination == Termination::GradTol);
  CHECK(at_min.iterations == 0);
  CHECK(to_string(Termination::LineSearchFail) == "line_search_fail");
}

TEST_CASE("minimize_cg reports non-finite costs") {
  auto bad_cost = [](const OrthonormalFrame&) { return std::numeric_limits<double>::quiet_NaN(); };
  auto grad = [](const OrthonormalFrame& u) { return Eigen::MatrixXd(u.matrix()); };
  CHECK_THROWS_AS(minimize_cg(bad_cost, grad, random_frame(3, 1, 1), {}), NumericalError);
}

TEST_CASE("iteration logger format") {
  std::ostringstream out;
  const Eigen::Matrix3d m = Eigen::Vector3d(1, 2, 3).asDiagonal();
  const auto r = minimize_quadratic(m, random_frame(3, 1, 2), {}, make_iteration_logger(out));
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
    CHECK(line.rfind(std::to_string(lines) + ",", 0) == 0);
    ++lines;
  }
  CHECK(lines == r.iterations + 1);
}
