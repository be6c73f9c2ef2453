#pragma once

#include <cstdint>

#include "geomap/dataset.hpp"

namespace geomap {

/// Overlapping Gaussian classes in a randomly rotated basis. Class means sit
/// `separation` apart along the first `classes` axes; every axis has unit
/// within-class spread except the last `noisy_dims`, which have `noise_std`.
struct SyntheticSpec {
  int classes = 3;
  int dim = 10;
  int per_class = 60;
  double separation = 2.0;
  int noisy_dims = 1;
  double noise_std = 4.0;
  bool rotate = true;
  std::uint64_t seed = 2024;

  bool operator==(const SyntheticSpec&) const = default;
};

LabeledDataset gaussian_benchmark(const SyntheticSpec& spec);

}  // namespace geomap
