#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsedual {

using Index = std::int64_t;

// Thrown when a solver hits the divergence guard (non-finite or huge primal).
class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(std::string what, Index iteration, double primal)
      : std::runtime_error(std::move(what)), iteration_(iteration), primal_(primal) {}
  Index iteration() const { return iteration_; }
  double primal() const { return primal_; }

 private:
  Index iteration_;
  double primal_;
};

// Dense vector of finite reals; constructors reject NaN/Inf, mutating callers
// are trusted to keep entries finite.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(Index d);
  explicit DenseVector(std::vector<double> values);

  Index dim() const { return static_cast<Index>(values_.size()); }
  double operator[](Index i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](Index i) { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const DenseVector& other) const = default;

 private:
  std::vector<double> values_;
};

// Strictly increasing list of nonnegative coordinate indices.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<Index> indices);

  Index size() const { return static_cast<Index>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  bool contains(Index i) const;
  Index max_index() const { return indices_.empty() ? -1 : indices_.back(); }
  const std::vector<Index>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool operator==(const IndexSet& other) const = default;

 private:
  std::vector<Index> indices_;
};

// Sparse row: sorted index pattern plus matching finite values.
class SparseSample {
 public:
  SparseSample() = default;
  SparseSample(IndexSet indices, std::vector<double> values);

  Index nnz() const { return indices_.size(); }
  Index max_index() const { return indices_.max_index(); }
  const IndexSet& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }
  double squared_norm() const;
  SparseSample scaled(double factor) const;

 private:
  IndexSet indices_;
  std::vector<double> values_;
};

}  // namespace sparsedual
