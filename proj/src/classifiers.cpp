#include "geomap/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geomap/errors.hpp"
#include "geomap/kernels.hpp"
#include "geomap/rng.hpp"

namespace geomap {

std::string ClassifierSpec::name() const {
  switch (kind) {
    case ClassifierKind::KNN: return std::to_string(k) + "nn";
    case ClassifierKind::LinearSVM: return "svm";
    case ClassifierKind::LDC: return "ldc";
    case ClassifierKind::QDC: return "qdc";
    case ClassifierKind::Tree: return "tree";
  }
  return "unknown";
}

ClassifierSpec ClassifierSpec::parse(const std::string& name) {
  if (name == "svm") return {ClassifierKind::LinearSVM, 0};
  if (name == "ldc") return {ClassifierKind::LDC, 0};
  if (name == "qdc") return {ClassifierKind::QDC, 0};
  if (name == "tree") return {ClassifierKind::Tree, 0};
  if (name.size() > 2 && name.ends_with("nn")) {
    const std::string digits = name.substr(0, name.size() - 2);
    if (std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      const int k = std::stoi(digits);
      if (k >= 1) return {ClassifierKind::KNN, k};
    }
  }
  throw ConfigError("unknown classifier '" + name + "' (expected svm, <k>nn, ldc, qdc or tree)");
}

Labels Classifier::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() == 0) return {};
  if (x.rows() != input_dim())
    throw DataError("predict: classifier trained on " + std::to_string(input_dim()) + "-dimensional data, got " +
                    std::to_string(x.rows()));
  return predict_checked(x);
}

namespace {

// Lowest index among the maxima.
int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v) {
  int best = 0;
  for (int k = 1; k < v.size(); ++k)
    if (v(k) > v(best)) best = k;
  return best;
}

void require_finite(const LabeledDataset& train, const char* who) {
  if (!train.features().allFinite()) throw DataError(std::string(who) + ": non-finite features");
}

}  // namespace

// --- k nearest neighbours ---------------------------------------------------

KnnClassifier::KnnClassifier(const LabeledDataset& train, int k)
    : x_(train.features()), y_(train.labels()), classes_(train.class_count()), k_(k) {
  if (k < 1 || k > train.sample_count())
    throw ConfigError("knn: k=" + std::to_string(k) + " outside 1.." + std::to_string(train.sample_count()));
}

Labels KnnClassifier::predict_checked(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd dist = parallel::cross_sq_distances(x_, x);
  const int p = static_cast<int>(x_.cols());
  Labels out(x.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index q = 0; q < x.cols(); ++q) {
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k_, order.end(), [&](int a, int b) {
      const double da = dist(a, q), db = dist(b, q);
      return da < db || (da == db && a < b);
    });
    std::vector<int> votes(classes_, 0);
    for (int r = 0; r < k_; ++r) ++votes[y_[order[r]] - 1];
    const int top = *std::max_element(votes.begin(), votes.end());
    // Among classes tied on votes, the one owning the nearest neighbour wins.
    for (int r = 0; r < k_; ++r)
      if (votes[y_[order[r]] - 1] == top) {
        out[q] = y_[order[r]];
        break;
      }
  }
  return out;
}

// --- linear SVM -------------------------------------------------------------

BinarySvmSolution solve_binary_svm(const Eigen::MatrixXd& x, const std::vector<int>& y, const SvmOptions& opts) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (static_cast<int>(y.size()) != p) throw DataError("svm: label count mismatch");
  if (!(opts.c > 0.0)) throw ConfigError("svm: C must be positive");

  BinarySvmSolution sol;
  sol.w = Eigen::VectorXd::Zero(n + 1);
  sol.alpha = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd qdiag(p);
  for (int i = 0; i < p; ++i) qdiag(i) = x.col(i).squaredNorm() + 1.0;

  Xoshiro256 rng(opts.seed);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  for (sol.epochs = 0; sol.epochs < opts.max_epochs;) {
    rng.shuffle(std::span<int>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (int i : order) {
      const double yi = y[i];
      const double g = yi * (sol.w.head(n).dot(x.col(i)) + sol.w(n)) - 1.0;
      double pg = g;
      if (sol.alpha(i) <= 0.0) pg = std::min(g, 0.0);
      else if (sol.alpha(i) >= opts.c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = sol.alpha(i);
        sol.alpha(i) = std::clamp(old - g / qdiag(i), 0.0, opts.c);
        const double delta = (sol.alpha(i) - old) * yi;
        sol.w.head(n) += delta * x.col(i);
        sol.w(n) += delta;
      }
    }
    ++sol.epochs;
    if (pg_max - pg_min <= opts.tol) break;
  }
  return sol;
}

double svm_dual_objective(const Eigen::MatrixXd& x, const std::vector<int>& y, const Eigen::VectorXd& alpha) {
  const auto n = x.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    w.head(n) += alpha(i) * y[i] * x.col(i);
    w(n) += alpha(i) * y[i];
  }
  return 0.5 * w.squaredNorm() - alpha.sum();
}

LinearSvm::LinearSvm(const LabeledDataset& train, const SvmOptions& opts) {
  require_finite(train, "svm");
  const int c = train.class_count();
  if (c < 2) throw DataError("svm: need at least two classes");
  const int n = train.dim();
  weights_.resize(n, c);
  biases_.resize(c);
  for (int k = 0; k < c; ++k) {
    std::vector<int> y(train.sample_count());
    for (int j = 0; j < train.sample_count(); ++j) y[j] = train.labels()[j] == k + 1 ? 1 : -1;
    SvmOptions o = opts;
    o.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(k));
    const BinarySvmSolution sol = solve_binary_svm(train.features(), y, o);
    weights_.col(k) = sol.w.head(n);
    biases_(k) = sol.w(n);
  }
}

Eigen::MatrixXd LinearSvm::decision_values(const Eigen::MatrixXd& x) const {
  return (weights_.transpose() * x).colwise() + biases_;
}

Labels LinearSvm::predict_checked(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd dv = decision_values(x);
  Labels out(x.cols());
  for (Eigen::Index q = 0; q < x.cols(); ++q) out[q] = argmax_lowest(dv.col(q)) + 1;
  return out;
}

// --- Gaussian discriminants -------------------------------------------------

GaussianClassifier::GaussianClassifier(const LabeledDataset& train, bool quadratic) : quadratic_(quadratic) {
  require_finite(train, quadratic ? "qdc" : "ldc");
  const int c = train.class_count();
  const int n = train.dim();
  const int p = train.sample_count();
  if (c < 2) throw DataError("gaussian classifier: need at least two classes");
  const auto& x = train.features();
  const auto& y = train.labels();

  means_ = Eigen::MatrixXd::Zero(n, c);
  const std::vector<int> counts = train.class_sizes();
  for (int j = 0; j < p; ++j) means_.col(y[j] - 1) += x.col(j);
  for (int k = 0; k < c; ++k) means_.col(k) /= counts[k];

  std::vector<Eigen::MatrixXd> scatter(c, Eigen::MatrixXd::Zero(n, n));
  for (int j = 0; j < p; ++j) {
    const Eigen::VectorXd r = x.col(j) - means_.col(y[j] - 1);
    scatter[y[j] - 1].noalias() += r * r.transpose();
  }
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : scatter) pooled += s;
  pooled /= static_cast<double>(std::max(p - c, 1));

  auto regularize = [n](Eigen::MatrixXd s) {
    const double eps = 1e-6 * s.trace() / n;
    s.diagonal().array() += eps > 0.0 ? eps : 1e-6;
    return s;
  };
  auto factor = [this](const Eigen::MatrixXd& s) {
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("gaussian classifier: covariance not positive definite");
    const Eigen::MatrixXd l = llt.matrixL();
    log_det_.push_back(2.0 * l.diagonal().array().log().sum());
    chol_.push_back(std::move(llt));
  };

  pooled_fallback_.assign(c, !quadratic);
  if (!quadratic) {
    factor(regularize(pooled));
    return;
  }
  const Eigen::MatrixXd pooled_reg = regularize(pooled);
  for (int k = 0; k < c; ++k) {
    if (counts[k] < 2) {
      pooled_fallback_[k] = true;
      factor(pooled_reg);
    } else {
      factor(regularize(scatter[k] / static_cast<double>(counts[k] - 1)));
    }
  }
}

Eigen::MatrixXd GaussianClassifier::discriminants(const Eigen::MatrixXd& x) const {
  const int c = class_count();
  Eigen::MatrixXd g(c, x.cols());
  for (int k = 0; k < c; ++k) {
    const auto& llt = chol_[quadratic_ ? k : 0];
    const double logdet = log_det_[quadratic_ ? k : 0];
    const Eigen::MatrixXd r = x.colwise() - means_.col(k);
    const Eigen::MatrixXd z = llt.matrixL().solve(r);
    g.row(k) = -0.5 * (z.colwise().squaredNorm().array() + logdet);
  }
  return g;
}

Labels GaussianClassifier::predict_checked(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd g = discriminants(x);
  Labels out(x.cols());
  for (Eigen::Index q = 0; q < x.cols(); ++q) out[q] = argmax_lowest(g.col(q)) + 1;
  return out;
}

// --- CART -------------------------------------------------------------------

namespace {

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double s = 0.0;
  for (int cnt : counts) {
    const double f = static_cast<double>(cnt) / total;
    s += f * f;
  }
  return 1.0 - s;
}

int majority(const Labels& y, int classes, const std::vector<int>& idx) {
  std::vector<int> counts(classes, 0);
  for (int i : idx) ++counts[y[i] - 1];
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()) + 1;
}

constexpr double kGiniTie = 1e-12;

}  // namespace

GiniSplit best_gini_split(const Eigen::MatrixXd& x, const Labels& y, int classes, const std::vector<int>& idx) {
  GiniSplit best;
  best.impurity = std::numeric_limits<double>::infinity();
  const int total = static_cast<int>(idx.size());
  std::vector<int> sorted = idx;
  for (int f = 0; f < x.rows(); ++f) {
    std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) { return x(f, a) < x(f, b); });
    std::vector<int> left(classes, 0), right(classes, 0);
    for (int i : sorted) ++right[y[i] - 1];
    for (int pos = 0; pos + 1 < total; ++pos) {
      const int i = sorted[pos];
      ++left[y[i] - 1];
      --right[y[i] - 1];
      const double lo = x(f, i), hi = x(f, sorted[pos + 1]);
      if (!(lo < hi)) continue;
      const int nl = pos + 1, nr = total - nl;
      const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / total;
      if (imp < best.impurity - kGiniTie) {
        best.feature = f;
        best.threshold = lo + 0.5 * (hi - lo);
        if (!(best.threshold < hi)) best.threshold = lo;
        best.impurity = imp;
      }
    }
  }
  return best;
}

DecisionTree::DecisionTree(const LabeledDataset& train, const TreeOptions& opts)
    : opts_(opts), dim_(train.dim()), classes_(train.class_count()) {
  if (opts.max_depth < 0 || opts.min_samples_split < 2) throw ConfigError("tree: invalid options");
  std::vector<int> idx(train.sample_count());
  std::iota(idx.begin(), idx.end(), 0);
  build(train.features(), train.labels(), idx, 0);
}

int DecisionTree::build(const Eigen::MatrixXd& x, const Labels& y, std::vector<int>& idx, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[id].label = majority(y, classes_, idx);
  const bool pure = std::all_of(idx.begin(), idx.end(), [&](int i) { return y[i] == y[idx.front()]; });
  if (pure || depth >= opts_.max_depth || static_cast<int>(idx.size()) < opts_.min_samples_split) return id;
  const GiniSplit split = best_gini_split(x, y, classes_, idx);
  if (split.feature < 0) return id;

  std::vector<int> left, right;
  for (int i : idx) (x(split.feature, i) <= split.threshold ? left : right).push_back(i);
  const int l = build(x, y, left, depth + 1);
  const int r = build(x, y, right, depth + 1);
  nodes_[id].feature = split.feature;
  nodes_[id].threshold = split.threshold;
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

Labels DecisionTree::predict_checked(const Eigen::MatrixXd& x) const {
  Labels out(x.cols());
  for (Eigen::Index q = 0; q < x.cols(); ++q) {
    int node = 0;
    while (nodes_[node].feature >= 0)
      node = x(nodes_[node].feature, q) <= nodes_[node].threshold ? nodes_[node].left : nodes_[node].right;
    out[q] = nodes_[node].label;
  }
  return out;
}

std::unique_ptr<Classifier> fit_classifier(const ClassifierSpec& spec, const LabeledDataset& train,
                                           const ClassifierOptions& opts) {
  switch (spec.kind) {
    case ClassifierKind::KNN: return std::make_unique<KnnClassifier>(train, spec.k);
    case ClassifierKind::LinearSVM: return std::make_unique<LinearSvm>(train, opts.svm);
    case ClassifierKind::LDC: return std::make_unique<GaussianClassifier>(train, false);
    case ClassifierKind::QDC: return std::make_unique<GaussianClassifier>(train, true);
    case ClassifierKind::Tree: return std::make_unique<DecisionTree>(train, opts.tree);
  }
  throw ConfigError("unknown classifier kind");
}

}  // namespace geomap
