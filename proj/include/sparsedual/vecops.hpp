#pragma once

#include "sparsedual/types.hpp"

namespace sparsedual {

// Indices of the k largest-magnitude entries; magnitude ties broken by the
// smaller index. Throws std::invalid_argument when k > dim or k < 0.
IndexSet top_k_indices(const DenseVector& x, Index k);

// Keeps the top_k_indices entries of x, zeroes the rest.
DenseVector hard_threshold_k(const DenseVector& x, Index k);

// Copy of x with entries off F zeroed. Throws on indices >= dim.
DenseVector restrict_to_support(const DenseVector& x, const IndexSet& f);

// min |x_i| over the nonzero entries. Throws std::domain_error on the zero vector.
double min_abs_on_support(const DenseVector& x);

double inf_norm(const DenseVector& x);

double squared_norm(const DenseVector& x);

IndexSet support(const DenseVector& x);

// Sparse-dense inner product; throws on dimension mismatch.
double dot(const DenseVector& x, const SparseSample& s);

}  // namespace sparsedual
