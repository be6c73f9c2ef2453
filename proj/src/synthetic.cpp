#include "geomap/synthetic.hpp"

#include "geomap/errors.hpp"
#include "geomap/rng.hpp"
#include "geomap/stiefel.hpp"

namespace geomap {

LabeledDataset gaussian_benchmark(const SyntheticSpec& spec) {
  if (spec.classes < 2 || spec.dim < spec.classes || spec.per_class < 1 || spec.noisy_dims < 0 ||
      spec.noisy_dims > spec.dim - spec.classes)
    throw ConfigError("gaussian_benchmark: inconsistent shape");
  Xoshiro256 rng(spec.seed);
  const int n = spec.dim;
  const int p = spec.classes * spec.per_class;
  Eigen::MatrixXd x(n, p);
  Labels y(p);
  for (int k = 0; k < spec.classes; ++k)
    for (int s = 0; s < spec.per_class; ++s) {
      const int j = k * spec.per_class + s;
      for (int i = 0; i < n; ++i) {
        const double sd = i >= n - spec.noisy_dims ? spec.noise_std : 1.0;
        x(i, j) = sd * rng.normal();
      }
      x(k, j) += spec.separation;
      y[j] = k + 1;
    }
  if (spec.rotate) x = random_frame(n, n, derive_seed(spec.seed, 1)).matrix() * x;
  return LabeledDataset(std::move(x), std::move(y), spec.classes);
}

}  // namespace geomap
