#include <doctest.h>

#include <sstream>

#include "geomap/errors.hpp"
#include "geomap/metrics.hpp"
#include "test_util.hpp"

using namespace geomap;

namespace {

// Expands a count matrix into label vectors (row = truth, column = prediction).
std::pair<Labels, Labels> expand(const Eigen::MatrixXi& counts) {
  Labels t, p;
  for (int a = 0; a < counts.rows(); ++a)
    for (int b = 0; b < counts.cols(); ++b)
      for (int k = 0; k < counts(a, b); ++k) {
        t.push_back(a + 1);
        p.push_back(b + 1);
      }
  return {t, p};
}

ConfusionMatrix from_counts(const Eigen::MatrixXi& counts) {
  const auto [t, p] = expand(counts);
  return confusion(t, p, static_cast<int>(counts.rows()));
}

}  // namespace

TEST_CASE("confusion counts") {
  CHECK(confusion({1, 2}, {1, 2}, 2).counts == Eigen::Matrix2i::Identity());
  Eigen::Matrix2i off;
  off << 0, 2, 0, 0;
  CHECK(confusion({1, 1}, {2, 2}, 2).counts == off);
  const auto cm = confusion({1, 2, 1}, {1, 1, 2}, 3);
  CHECK(cm.counts.row(2).isZero());
  CHECK(cm.total == 3);
  CHECK_THROWS_AS(confusion({1, 2}, {1}, 2), DataError);
  CHECK_THROWS_AS(confusion({}, {}, 2), DataError);
  CHECK_THROWS_AS(confusion({1, 3}, {1, 1}, 2), DataError);
}

TEST_CASE("worked example [[45,5],[10,40]]") {
  Eigen::Matrix2i counts;
  counts << 45, 5, 10, 40;
  const auto cm = from_counts(counts);
  CHECK(cm.counts == counts);
  CHECK(overall_accuracy(cm) == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(average_accuracy(cm).value == doctest::Approx(0.85).epsilon(1e-15));
  CHECK(cohen_kappa(cm).value == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("perfect and hopeless matrices") {
  Eigen::Matrix2i perfect;
  perfect << 50, 0, 0, 50;
  const auto good = from_counts(perfect);
  CHECK(overall_accuracy(good) == 1.0);
  CHECK(average_accuracy(good).value == 1.0);
  CHECK(cohen_kappa(good).value == 1.0);
  Eigen::Matrix2i wrong;
  wrong << 0, 3, 4, 0;
  CHECK(overall_accuracy(from_counts(wrong)) == 0.0);
}

TEST_CASE("constant prediction on balanced truth has zero kappa") {
  const auto cm = confusion({1, 1, 2, 2}, {1, 1, 1, 1}, 2);
  CHECK(cohen_kappa(cm).value == 0.0);
  CHECK_FALSE(cohen_kappa(cm).degenerate);
}

TEST_CASE("empty class rows are excluded from AA") {
  const auto cm = confusion({1, 1, 2}, {1, 2, 2}, 3);
  const auto aa = average_accuracy(cm);
  CHECK(aa.value == doctest::Approx(0.75));
  CHECK(aa.empty_classes);
}

TEST_CASE("degenerate chance agreement") {
  const auto cm = confusion({1, 1}, {1, 1}, 2);
  const auto k = cohen_kappa(cm);
  CHECK(k.degenerate);
  CHECK(k.value == 0.0);
}

TEST_CASE("scores are invariant to consistent class relabeling and stay in range") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Xoshiro256 rng(seed);
    Labels t(40), p(40);
    for (int i = 0; i < 40; ++i) {
      t[i] = static_cast<int>(rng.below(4)) + 1;
      p[i] = rng.uniform() < 0.5 ? t[i] : static_cast<int>(rng.below(4)) + 1;
    }
    const int relabel[4] = {3, 1, 4, 2};
    Labels t2(40), p2(40);
    for (int i = 0; i < 40; ++i) {
      t2[i] = relabel[t[i] - 1];
      p2[i] = relabel[p[i] - 1];
    }
    const auto a = confusion(t, p, 4), b = confusion(t2, p2, 4);
    CHECK(overall_accuracy(a) == overall_accuracy(b));
    CHECK(average_accuracy(a).value == doctest::Approx(average_accuracy(b).value).epsilon(1e-15));
    CHECK(cohen_kappa(a).value == doctest::Approx(cohen_kappa(b).value).epsilon(1e-15));
    const double k = cohen_kappa(a).value;
    CHECK(k >= -1.0);
    CHECK(k <= 1.0);
    CHECK((k == 1.0) == (a.counts.diagonal().sum() == a.total));
  }
}

TEST_CASE("confusion CSV") {
  Eigen::Matrix2i counts;
  counts << 45, 5, 10, 40;
  std::ostringstream out;
  write_confusion_csv(from_counts(counts), out);
  CHECK(out.str() == "45,5\n10,40\n");
}
