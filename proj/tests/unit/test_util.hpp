#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <Eigen/Dense>

#include "geomap/dataset.hpp"
#include "geomap/rng.hpp"

namespace geomap::testing {

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

/// Random labeled set with every class present; labels cycle 1..c before
/// being shuffled.
inline LabeledDataset random_labeled(int n, int p, int c, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Labels y(p);
  for (int j = 0; j < p; ++j) y[j] = j % c + 1;
  rng.shuffle(std::span<int>(y));
  return LabeledDataset(random_matrix(n, p, derive_seed(seed, 7)), std::move(y), c);
}

/// Per-test scratch directory under the system temp dir, removed on exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() / ("geomap_test_" + tag)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace geomap::testing
