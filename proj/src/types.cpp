#include "sparsedual/types.hpp"

#include <algorithm>
#include <cmath>

namespace sparsedual {

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace

DenseVector::DenseVector(Index d) {
  if (d < 0) throw std::invalid_argument("DenseVector: negative dimension");
  values_.assign(static_cast<std::size_t>(d), 0.0);
}

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "DenseVector");
}

IndexSet::IndexSet(std::vector<Index> indices) : indices_(std::move(indices)) {
  for (std::size_t p = 0; p < indices_.size(); ++p) {
    if (indices_[p] < 0) throw std::invalid_argument("IndexSet: negative index");
    if (p > 0 && indices_[p] <= indices_[p - 1]) {
      throw std::invalid_argument("IndexSet: indices must be strictly increasing");
    }
  }
}

bool IndexSet::contains(Index i) const {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), i);
  return it != indices_.end() && *it == i;
}

SparseSample::SparseSample(IndexSet indices, std::vector<double> values)
    : indices_(std::move(indices)), values_(std::move(values)) {
  if (static_cast<std::size_t>(indices_.size()) != values_.size()) {
    throw std::invalid_argument("SparseSample: index/value length mismatch");
  }
  require_finite(values_, "SparseSample");
}

double SparseSample::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

SparseSample SparseSample::scaled(double factor) const {
  std::vector<double> scaled_values(values_);
  for (double& v : scaled_values) v *= factor;
  return SparseSample(indices_, std::move(scaled_values));
}

}  // namespace sparsedual
