#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace geomap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Labeled samples stored column-wise: `features` is dim x sample_count and
/// column j belongs to `labels[j]`. Labels are contiguous in 1..class_count.
///
/// `original_labels[k - 1]` is the label the file used for internal class k.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  /// Validates every invariant; throws DataError on violation.
  LabeledDataset(Matrix features, Labels labels, int class_count,
                 std::vector<std::int64_t> original_labels = {});

  /// Builds a dataset from arbitrary integer labels, remapping them to
  /// 1..c in ascending order of the original values.
  static LabeledDataset from_raw_labels(Matrix features, std::span<const std::int64_t> raw);

  const Matrix& features() const noexcept { return features_; }
  const Labels& labels() const noexcept { return labels_; }
  int class_count() const noexcept { return class_count_; }
  int dim() const noexcept { return static_cast<int>(features_.rows()); }
  int sample_count() const noexcept { return static_cast<int>(features_.cols()); }
  const std::vector<std::int64_t>& original_labels() const noexcept { return original_labels_; }

  /// Number of samples in each class, index k-1 for class k.
  std::vector<int> class_sizes() const;

  /// Columns `indices` in the given order; keeps class_count and the label
  /// mapping. Every class must still be represented.
  LabeledDataset subset(std::span<const int> indices) const;

  /// Same labels, new feature matrix (e.g. after a projection).
  LabeledDataset with_features(Matrix features) const;

  /// 64-bit FNV-1a over dimensions, feature bytes and labels.
  std::uint64_t fingerprint() const;

 private:
  Matrix features_;
  Labels labels_;
  int class_count_ = 0;
  std::vector<std::int64_t> original_labels_;
};

struct SplitSpec {
  int train_per_class = 10;
  std::uint64_t seed = 0;

  bool operator==(const SplitSpec&) const = default;
};

struct Split {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<int> train_indices;  // ascending column indices into the source
  std::vector<int> test_indices;   // ascending
};

struct StandardizeStats {
  Vector mean;
  Vector std;  // population std; 0 marks a constant band
};

LabeledDataset load_csv(const std::filesystem::path& path);
LabeledDataset load_hsb(const std::filesystem::path& path);

/// Dispatches on extension: ".hsb" is binary, everything else CSV.
LabeledDataset load_dataset(const std::filesystem::path& path);

/// Writes n features then the original label per row, `%.17g` precision.
void save_csv(const LabeledDataset& ds, const std::filesystem::path& path);

/// Writes a 1 x p HSB cube of the labeled samples. Original labels must fit
/// in 1..65535.
void save_hsb(const LabeledDataset& ds, const std::filesystem::path& path);

/// Draws `train_per_class` samples per class without replacement.
Split split_per_class(const LabeledDataset& ds, const SplitSpec& spec);

/// Per-band z-score. With `stats` the supplied statistics are applied,
/// otherwise they are computed from `ds`. Constant bands pass through.
std::pair<LabeledDataset, StandardizeStats> standardize(
    const LabeledDataset& ds, const std::optional<StandardizeStats>& stats = std::nullopt);

Matrix apply_standardize(const Matrix& x, const StandardizeStats& stats);
Matrix invert_standardize(const Matrix& z, const StandardizeStats& stats);

}  // namespace geomap
