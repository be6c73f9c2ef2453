#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geomap/dataset.hpp"

namespace geomap {

enum class ClassifierKind { KNN, LinearSVM, LDC, QDC, Tree };

/// A classifier name as used in configs and reports: "svm", "1nn", "3nn",
/// "5nn" (any "<k>nn"), "ldc", "qdc", "tree".
struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::KNN;
  int k = 1;  // KNN only

  std::string name() const;
  static ClassifierSpec parse(const std::string& name);
  bool operator==(const ClassifierSpec&) const = default;
};

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-4;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
  bool operator==(const SvmOptions&) const = default;
};

struct TreeOptions {
  int max_depth = 20;
  int min_samples_split = 2;
  bool operator==(const TreeOptions&) const = default;
};

/// Fitted classifier; predictions are labels in 1..class_count.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassifierKind kind() const = 0;
  virtual int input_dim() const = 0;
  virtual int class_count() const = 0;

  /// One label per column of `x`. Throws DataError on dimension mismatch.
  Labels predict(const Eigen::MatrixXd& x) const;

 protected:
  virtual Labels predict_checked(const Eigen::MatrixXd& x) const = 0;
};

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(const LabeledDataset& train, int k);
  ClassifierKind kind() const override { return ClassifierKind::KNN; }
  int input_dim() const override { return static_cast<int>(x_.rows()); }
  int class_count() const override { return classes_; }
  int k() const { return k_; }

 protected:
  Labels predict_checked(const Eigen::MatrixXd& x) const override;

 private:
  Eigen::MatrixXd x_;
  Labels y_;
  int classes_;
  int k_;
};

/// One-vs-rest linear SVM (L2-regularized hinge loss) trained by dual
/// coordinate descent. The bias is an appended constant-1 feature.
class LinearSvm final : public Classifier {
 public:
  LinearSvm(const LabeledDataset& train, const SvmOptions& opts);
  ClassifierKind kind() const override { return ClassifierKind::LinearSVM; }
  int input_dim() const override { return static_cast<int>(weights_.rows()); }
  int class_count() const override { return static_cast<int>(weights_.cols()); }

  const Eigen::MatrixXd& weights() const { return weights_; }  // n x c
  const Eigen::VectorXd& biases() const { return biases_; }    // c
  Eigen::MatrixXd decision_values(const Eigen::MatrixXd& x) const;  // c x q

 protected:
  Labels predict_checked(const Eigen::MatrixXd& x) const override;

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd biases_;
};

/// Binary dual coordinate descent on
///   min_a 0.5 a^T Q a - sum(a),  0 <= a_i <= C,  Q_ij = y_i y_j z_i^T z_j
/// where z_i is x_i with a trailing 1. Returns the primal w (n + 1 entries,
/// last one the bias) and the dual variables.
struct BinarySvmSolution {
  Eigen::VectorXd w;
  Eigen::VectorXd alpha;
  int epochs = 0;
};
BinarySvmSolution solve_binary_svm(const Eigen::MatrixXd& x, const std::vector<int>& y_pm1, const SvmOptions& opts);

/// Dual objective 0.5 a^T Q a - sum(a) for the augmented problem above.
double svm_dual_objective(const Eigen::MatrixXd& x, const std::vector<int>& y_pm1, const Eigen::VectorXd& alpha);

/// Gaussian discriminant with equal priors. Linear: one pooled covariance;
/// quadratic: per-class covariances, falling back to pooled for classes with
/// fewer than two samples. Covariances get + eps I, eps = 1e-6 trace / n.
class GaussianClassifier final : public Classifier {
 public:
  GaussianClassifier(const LabeledDataset& train, bool quadratic);
  ClassifierKind kind() const override { return quadratic_ ? ClassifierKind::QDC : ClassifierKind::LDC; }
  int input_dim() const override { return static_cast<int>(means_.rows()); }
  int class_count() const override { return static_cast<int>(means_.cols()); }
  const std::vector<bool>& pooled_fallback() const { return pooled_fallback_; }

  /// Log posterior up to a shared constant, c x q.
  Eigen::MatrixXd discriminants(const Eigen::MatrixXd& x) const;

 protected:
  Labels predict_checked(const Eigen::MatrixXd& x) const override;

 private:
  bool quadratic_;
  Eigen::MatrixXd means_;                     // n x c
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol_;  // one per class
  std::vector<double> log_det_;
  std::vector<bool> pooled_fallback_;
};

/// CART with Gini impurity and axis-aligned midpoint thresholds.
class DecisionTree final : public Classifier {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
  };

  DecisionTree(const LabeledDataset& train, const TreeOptions& opts);
  ClassifierKind kind() const override { return ClassifierKind::Tree; }
  int input_dim() const override { return dim_; }
  int class_count() const override { return classes_; }
  const std::vector<Node>& nodes() const { return nodes_; }

 protected:
  Labels predict_checked(const Eigen::MatrixXd& x) const override;

 private:
  int build(const Eigen::MatrixXd& x, const Labels& y, std::vector<int>& idx, int depth);

  TreeOptions opts_;
  int dim_;
  int classes_;
  std::vector<Node> nodes_;
};

struct GiniSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child impurity
};

/// Best split of `idx` (lowest weighted Gini; ties to lower feature then
/// smaller threshold). feature == -1 when every feature is constant.
GiniSplit best_gini_split(const Eigen::MatrixXd& x, const Labels& y, int classes, const std::vector<int>& idx);

struct ClassifierOptions {
  SvmOptions svm;
  TreeOptions tree;

  bool operator==(const ClassifierOptions&) const = default;
};

std::unique_ptr<Classifier> fit_classifier(const ClassifierSpec& spec, const LabeledDataset& train,
                                           const ClassifierOptions& opts = {});

}  // namespace geomap
