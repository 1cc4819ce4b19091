#include "sparsedual/vecops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsedual {

IndexSet top_k_indices(const DenseVector& x, Index k) {
  const Index d = x.dim();
  if (k < 0 || k > d) {
    throw std::invalid_argument("top_k_indices: budget k outside [0, dim]");
  }
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  // Strict total order (|x_i| desc, index asc) keeps the selection deterministic.
  auto before = [&x](Index a, Index b) {
    const double ma = std::fabs(x[a]);
    const double mb = std::fabs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  if (k < d) {
    std::nth_element(order.begin(), order.begin() + k, order.end(), before);
  }
  std::vector<Index> picked(order.begin(), order.begin() + k);
  std::sort(picked.begin(), picked.end());
  return IndexSet(std::move(picked));
}

DenseVector hard_threshold_k(const DenseVector& x, Index k) {
  IndexSet keep = top_k_indices(x, k);
  DenseVector out(x.dim());
  for (Index i : keep) out[i] = x[i];
  return out;
}

DenseVector restrict_to_support(const DenseVector& x, const IndexSet& f) {
  if (f.max_index() >= x.dim()) {
    throw std::invalid_argument("restrict_to_support: index out of range");
  }
  DenseVector out(x.dim());
  for (Index i : f) out[i] = x[i];
  return out;
}

double min_abs_on_support(const DenseVector& x) {
  double best = -1.0;
  for (Index i = 0; i < x.dim(); ++i) {
    const double m = std::fabs(x[i]);
    if (m > 0.0 && (best < 0.0 || m < best)) best = m;
  }
  if (best < 0.0) throw std::domain_error("min_abs_on_support: zero vector");
  return best;
}

double inf_norm(const DenseVector& x) {
  double best = 0.0;
  for (Index i = 0; i < x.dim(); ++i) best = std::max(best, std::fabs(x[i]));
  return best;
}

double squared_norm(const DenseVector& x) {
  double s = 0.0;
  for (Index i = 0; i < x.dim(); ++i) s += x[i] * x[i];
  return s;
}

IndexSet support(const DenseVector& x) {
  std::vector<Index> idx;
  for (Index i = 0; i < x.dim(); ++i) {
    if (x[i] != 0.0) idx.push_back(i);
  }
  return IndexSet(std::move(idx));
}

double dot(const DenseVector& x, const SparseSample& s) {
  if (s.max_index() >= x.dim()) {
    throw std::invalid_argument("dot: sparse operand exceeds dense dimension");
  }
  double acc = 0.0;
  const auto& idx = s.indices().indices();
  const auto& val = s.values();
  for (std::size_t p = 0; p < val.size(); ++p) {
    acc += x[idx[p]] * val[p];
  }
  return acc;
}

}  // namespace sparsedual
