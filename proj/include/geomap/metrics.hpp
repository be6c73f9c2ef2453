#pragma once

#include <iosfwd>
#include <vector>

#include "geomap/dataset.hpp"

namespace geomap {

/// counts(t - 1, q - 1) = number of samples of true class t predicted as q.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;
  int total = 0;

  int classes() const { return static_cast<int>(counts.rows()); }
};

ConfusionMatrix confusion(const Labels& truth, const Labels& predicted, int classes);

double overall_accuracy(const ConfusionMatrix& cm);

struct AverageAccuracy {
  double value = 0.0;
  bool empty_classes = false;  // some true class had no samples and was skipped
};
AverageAccuracy average_accuracy(const ConfusionMatrix& cm);

struct Kappa {
  double value = 0.0;
  bool degenerate = false;  // chance agreement p_e == 1
};
Kappa cohen_kappa(const ConfusionMatrix& cm);

/// c lines of c comma-separated counts.
void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out);

}  // namespace geomap
