#pragma once

#include <string>
#include <vector>

#include "sparsedual/objective.hpp"
#include "sparsedual/types.hpp"

namespace sparsedual {

// Parameters of the correlated-design synthetic model: the first k_true
// features share mean mu1 and covariance (1-off_diag)*I + off_diag*J, the
// remaining features are independent unit-variance gaussians around mu2,
// responses are true_w^T x plus N(0, noise_sd^2) noise.
struct SyntheticSpec {
  Index d = 0;
  Index k_true = 0;
  Index n = 0;
  double noise_sd = 1.0;
  double off_diag = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset data;
  DenseVector true_w;
};

// Deterministic given spec.seed; draw order is fixed (mu1, mu2, then per
// sample: block gaussians, tail gaussians, noise).
SyntheticData generate_synthetic(const SyntheticSpec& spec);

struct LoadedData {
  std::vector<SparseSample> samples;
  std::vector<double> labels;
  Index dim = 0;
};

// Text lines "label idx:val idx:val ..." with 1-based strictly increasing
// indices, stored 0-based. dim_override < 1 infers dim from the max index.
// Malformed input throws with the offending line number.
LoadedData load_libsvm(const std::string& path, Index dim_override = -1);

// Inverse of load_libsvm; doubles use shortest round-trip formatting.
void write_libsvm(const std::string& path, const std::vector<SparseSample>& samples,
                  const std::vector<double>& labels);

// Scales every sample with norm > 1 down to unit norm and sets the flag.
void normalize_rows(Dataset& data);

// sign(y) with ties mapped to +1; used to turn regression responses into
// classification labels.
void binarize_labels(std::vector<double>& labels);

}  // namespace sparsedual
