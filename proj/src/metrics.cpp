#include "geomap/metrics.hpp"

#include <ostream>

#include "geomap/errors.hpp"

namespace geomap {

ConfusionMatrix confusion(const Labels& truth, const Labels& predicted, int classes) {
  if (truth.size() != predicted.size())
    throw DataError("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                    std::to_string(predicted.size()) + " predictions");
  if (truth.empty()) throw DataError("confusion: no samples");
  if (classes < 1) throw DataError("confusion: class count must be positive");
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(classes, classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], q = predicted[i];
    if (t < 1 || t > classes || q < 1 || q > classes)
      throw DataError("confusion: label out of range 1.." + std::to_string(classes) + " at position " +
                      std::to_string(i));
    ++cm.counts(t - 1, q - 1);
  }
  cm.total = static_cast<int>(truth.size());
  return cm;
}

double overall_accuracy(const ConfusionMatrix& cm) {
  return static_cast<double>(cm.counts.trace()) / cm.total;
}

AverageAccuracy average_accuracy(const ConfusionMatrix& cm) {
  AverageAccuracy aa;
  double sum = 0.0;
  int used = 0;
  for (int k = 0; k < cm.classes(); ++k) {
    const int row = cm.counts.row(k).sum();
    if (row == 0) {
      aa.empty_classes = true;
      continue;
    }
    sum += static_cast<double>(cm.counts(k, k)) / row;
    ++used;
  }
  aa.value = used > 0 ? sum / used : 0.0;
  return aa;
}

Kappa cohen_kappa(const ConfusionMatrix& cm) {
  const double total = cm.total;
  const double po = overall_accuracy(cm);
  double pe = 0.0;
  for (int k = 0; k < cm.classes(); ++k)
    pe += static_cast<double>(cm.counts.row(k).sum()) * cm.counts.col(k).sum();
  pe /= total * total;
  if (pe >= 1.0) return {0.0, true};
  return {(po - pe) / (1.0 - pe), false};
}

void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out) {
  for (int r = 0; r < cm.classes(); ++r) {
    for (int c = 0; c < cm.classes(); ++c) out << (c ? "," : "") << cm.counts(r, c);
    out << '\n';
  }
}

}  // namespace geomap
