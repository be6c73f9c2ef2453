#include "geomap/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "geomap/errors.hpp"
#include "geomap/rng.hpp"

namespace geomap {

static_assert(std::endian::native == std::endian::little,
              "HSB I/O assumes a little-endian host");

LabeledDataset::LabeledDataset(Matrix features, Labels labels, int class_count,
                               std::vector<std::int64_t> original_labels)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      class_count_(class_count),
      original_labels_(std::move(original_labels)) {
  if (static_cast<Eigen::Index>(labels_.size()) != features_.cols())
    throw DataError("label count " + std::to_string(labels_.size()) + " does not match " +
                    std::to_string(features_.cols()) + " samples");
  if (class_count_ < 1) throw DataError("class count must be positive");
  if (!features_.allFinite()) throw DataError("features contain NaN or infinite values");
  std::vector<int> seen(class_count_, 0);
  for (int y : labels_) {
    if (y < 1 || y > class_count_)
      throw DataError("label " + std::to_string(y) + " outside 1.." + std::to_string(class_count_));
    ++seen[y - 1];
  }
  for (int k = 0; k < class_count_; ++k)
    if (seen[k] == 0) throw DataError("class " + std::to_string(k + 1) + " has no samples");
  if (original_labels_.empty()) {
    original_labels_.resize(class_count_);
    for (int k = 0; k < class_count_; ++k) original_labels_[k] = k + 1;
  } else if (static_cast<int>(original_labels_.size()) != class_count_) {
    throw DataError("label mapping size does not match class count");
  }
}

LabeledDataset LabeledDataset::from_raw_labels(Matrix features,
                                               std::span<const std::int64_t> raw) {
  std::vector<std::int64_t> distinct(raw.begin(), raw.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  Labels labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto it = std::lower_bound(distinct.begin(), distinct.end(), raw[i]);
    labels[i] = static_cast<int>(it - distinct.begin()) + 1;
  }
  const int c = static_cast<int>(distinct.size());
  return LabeledDataset(std::move(features), std::move(labels), c, std::move(distinct));
}

std::vector<int> LabeledDataset::class_sizes() const {
  std::vector<int> sizes(class_count_, 0);
  for (int y : labels_) ++sizes[y - 1];
  return sizes;
}

LabeledDataset LabeledDataset::subset(std::span<const int> indices) const {
  Matrix f(features_.rows(), static_cast<Eigen::Index>(indices.size()));
  Labels l(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    f.col(static_cast<Eigen::Index>(j)) = features_.col(indices[j]);
    l[j] = labels_[indices[j]];
  }
  return LabeledDataset(std::move(f), std::move(l), class_count_, original_labels_);
}

LabeledDataset LabeledDataset::with_features(Matrix features) const {
  return LabeledDataset(std::move(features), labels_, class_count_, original_labels_);
}

std::uint64_t LabeledDataset::fingerprint() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001B3ULL;
    }
  };
  const std::int64_t dims[2] = {features_.rows(), features_.cols()};
  mix(dims, sizeof(dims));
  mix(features_.data(), sizeof(double) * static_cast<std::size_t>(features_.size()));
  mix(labels_.data(), sizeof(int) * labels_.size());
  return h;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void csv_error(const std::filesystem::path& path, std::size_t line,
                            const std::string& msg) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<double> values;
  std::vector<std::int64_t> raw_labels;
  std::size_t field_count = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2) csv_error(path, line_no, "expected at least one feature and a label");
    if (field_count == 0) field_count = fields.size();
    if (fields.size() != field_count)
      csv_error(path, line_no,
                "expected " + std::to_string(field_count) + " fields, found " +
                    std::to_string(fields.size()));
    for (std::size_t f = 0; f + 1 < fields.size(); ++f) {
      double v = 0.0;
      const auto sv = fields[f];
      const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
      if (ec != std::errc() || ptr != sv.data() + sv.size() || sv.empty())
        csv_error(path, line_no, "field " + std::to_string(f + 1) + " is not a number: '" +
                                     std::string(sv) + "'");
      if (!std::isfinite(v)) csv_error(path, line_no, "non-finite value in field " + std::to_string(f + 1));
      values.push_back(v);
    }
    std::int64_t label = 0;
    const auto sv = fields.back();
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), label);
    if (ec != std::errc() || ptr != sv.data() + sv.size() || sv.empty())
      csv_error(path, line_no, "label is not an integer: '" + std::string(sv) + "'");
    raw_labels.push_back(label);
  }
  if (raw_labels.empty()) throw DataError(path.string() + ": empty file");

  const auto n = static_cast<Eigen::Index>(field_count - 1);
  const auto p = static_cast<Eigen::Index>(raw_labels.size());
  // Rows of the file are samples; the row-major buffer maps directly onto columns.
  Matrix features = Eigen::Map<const Matrix>(values.data(), n, p);
  auto ds = LabeledDataset::from_raw_labels(std::move(features), raw_labels);
  if (ds.class_count() < 2) throw DataError(path.string() + ": need at least two distinct labels");
  return ds;
}

namespace {

constexpr char kHsbMagic[4] = {'H', 'S', 'B', '1'};
constexpr std::size_t kHsbHeader = 4 + 3 * sizeof(std::uint32_t);

}  // namespace

LabeledDataset load_hsb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kHsbMagic, 4) != 0)
    throw DataError(where + "bad magic, not an HSB1 file");
  if (bytes.size() < kHsbHeader) throw DataError(where + "truncated header");

  std::uint32_t dims[3];
  std::memcpy(dims, bytes.data() + 4, sizeof(dims));
  const std::uint64_t rows = dims[0], cols = dims[1], bands = dims[2];
  const std::uint64_t pixels = rows * cols;
  if (bands == 0) throw DataError(where + "zero bands declared");
  const std::uint64_t expected = kHsbHeader + pixels * bands * sizeof(double) + pixels * sizeof(std::uint16_t);
  if (bytes.size() < expected)
    throw DataError(where + "truncated payload: expected " + std::to_string(expected) +
                    " bytes, found " + std::to_string(bytes.size()));
  if (bytes.size() > expected)
    throw DataError(where + "declared dimensions inconsistent with file length (" +
                    std::to_string(bytes.size() - expected) + " trailing bytes)");

  const char* cube = bytes.data() + kHsbHeader;
  const char* label_bytes = cube + pixels * bands * sizeof(double);
  std::vector<std::uint16_t> labels(pixels);
  std::memcpy(labels.data(), label_bytes, pixels * sizeof(std::uint16_t));

  const auto labeled = static_cast<Eigen::Index>(std::count_if(
      labels.begin(), labels.end(), [](std::uint16_t l) { return l != 0; }));
  if (labeled == 0) throw DataError(where + "no labeled pixels");

  Matrix features(static_cast<Eigen::Index>(bands), labeled);
  std::vector<std::int64_t> raw;
  raw.reserve(static_cast<std::size_t>(labeled));
  Eigen::Index col = 0;
  for (std::uint64_t px = 0; px < pixels; ++px) {
    if (labels[px] == 0) continue;
    std::memcpy(features.col(col).data(), cube + px * bands * sizeof(double), bands * sizeof(double));
    raw.push_back(labels[px]);
    ++col;
  }
  auto ds = LabeledDataset::from_raw_labels(std::move(features), raw);
  if (ds.class_count() < 2) throw DataError(where + "need at least two distinct labels");
  return ds;
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  if (path.extension() == ".hsb") return load_hsb(path);
  return load_csv(path);
}

void save_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[32];
  for (int j = 0; j < ds.sample_count(); ++j) {
    for (int i = 0; i < ds.dim(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features()(i, j));
      out << buf << ',';
    }
    out << ds.original_labels()[ds.labels()[j] - 1] << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

void save_hsb(const LabeledDataset& ds, const std::filesystem::path& path) {
  for (auto l : ds.original_labels())
    if (l < 1 || l > 65535)
      throw DataError("label " + std::to_string(l) + " does not fit the HSB u16 label range 1..65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const std::uint32_t dims[3] = {1u, static_cast<std::uint32_t>(ds.sample_count()),
                                 static_cast<std::uint32_t>(ds.dim())};
  out.write(kHsbMagic, 4);
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  // Column-major storage is exactly band-interleaved-by-pixel.
  out.write(reinterpret_cast<const char*>(ds.features().data()),
            static_cast<std::streamsize>(sizeof(double) * ds.features().size()));
  std::vector<std::uint16_t> labels(ds.sample_count());
  for (int j = 0; j < ds.sample_count(); ++j)
    labels[j] = static_cast<std::uint16_t>(ds.original_labels()[ds.labels()[j] - 1]);
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(sizeof(std::uint16_t) * labels.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Split split_per_class(const LabeledDataset& ds, const SplitSpec& spec) {
  if (spec.train_per_class < 1) throw ConfigError("train_per_class must be >= 1");
  const int c = ds.class_count();
  std::vector<std::vector<int>> members(c);
  for (int j = 0; j < ds.sample_count(); ++j) members[ds.labels()[j] - 1].push_back(j);
  for (int k = 0; k < c; ++k)
    if (static_cast<int>(members[k].size()) <= spec.train_per_class)
      throw DataError("class " + std::to_string(k + 1) + " has " + std::to_string(members[k].size()) +
                      " samples; need at least " + std::to_string(spec.train_per_class + 1) +
                      " to draw " + std::to_string(spec.train_per_class) + " for training");

  Xoshiro256 rng(spec.seed);
  std::vector<char> is_train(ds.sample_count(), 0);
  for (int k = 0; k < c; ++k) {
    auto& pool = members[k];
    // Partial Fisher-Yates: the first k slots become the sample.
    for (int t = 0; t < spec.train_per_class; ++t) {
      const auto remaining = static_cast<std::uint64_t>(pool.size() - t);
      const auto pick = t + static_cast<int>(rng.below(remaining));
      std::swap(pool[t], pool[pick]);
      is_train[pool[t]] = 1;
    }
  }
  Split out;
  for (int j = 0; j < ds.sample_count(); ++j)
    (is_train[j] ? out.train_indices : out.test_indices).push_back(j);
  out.train = ds.subset(out.train_indices);
  out.test = ds.subset(out.test_indices);
  return out;
}

Matrix apply_standardize(const Matrix& x, const StandardizeStats& stats) {
  if (x.rows() != stats.mean.size() || x.rows() != stats.std.size())
    throw DataError("standardize: data has " + std::to_string(x.rows()) + " bands, stats have " +
                    std::to_string(stats.mean.size()));
  Matrix z = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (stats.std(i) > 0.0) z.row(i) = (x.row(i).array() - stats.mean(i)) / stats.std(i);
  return z;
}

Matrix invert_standardize(const Matrix& z, const StandardizeStats& stats) {
  if (z.rows() != stats.mean.size() || z.rows() != stats.std.size())
    throw DataError("standardize: dimension mismatch on inversion");
  Matrix x = z;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    if (stats.std(i) > 0.0) x.row(i) = z.row(i).array() * stats.std(i) + stats.mean(i);
  return x;
}

std::pair<LabeledDataset, StandardizeStats> standardize(
    const LabeledDataset& ds, const std::optional<StandardizeStats>& stats) {
  StandardizeStats s;
  if (stats) {
    s = *stats;
  } else {
    const auto& x = ds.features();
    s.mean = x.rowwise().mean();
    s.std.resize(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double var = (x.row(i).array() - s.mean(i)).square().mean();
      s.std(i) = std::sqrt(var);
      // Bands that are constant up to rounding are treated as constant.
      if (s.std(i) <= 1e-14 * std::max(1.0, std::abs(s.mean(i)))) s.std(i) = 0.0;
    }
  }
  return {ds.with_features(apply_standardize(ds.features(), s)), s};
}

}  // namespace geomap
