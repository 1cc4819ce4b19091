#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "sparsedual/losses.hpp"
#include "sparsedual/types.hpp"
#include "sparsedual/vecops.hpp"

namespace sparsedual {

// Raw data bag produced by generators/loaders; invariants are enforced when a
// ProblemInstance is built from it.
struct Dataset {
  std::vector<SparseSample> samples;
  std::vector<double> labels;
  Index dim = 0;
  bool rows_normalized = false;
};

// Immutable problem description: data, labels, loss, lambda > 0, 0 < k <= d.
// Classification labels are coerced 0 -> -1; anything outside {-1,0,+1} throws.
class ProblemInstance {
 public:
  ProblemInstance(Dataset data, LossModel loss, double lambda, Index k);

  Index n() const { return static_cast<Index>(data_.samples.size()); }
  Index dim() const { return data_.dim; }
  Index k() const { return k_; }
  double lambda() const { return lambda_; }
  const LossModel& loss() const { return loss_; }
  const SparseSample& sample(Index i) const { return data_.samples[static_cast<std::size_t>(i)]; }
  double label(Index i) const { return data_.labels[static_cast<std::size_t>(i)]; }
  const std::vector<SparseSample>& samples() const { return data_.samples; }
  const std::vector<double>& labels() const { return data_.labels; }
  bool rows_normalized() const { return data_.rows_normalized; }

 private:
  Dataset data_;
  LossModel loss_;
  double lambda_;
  Index k_;
};

// k-sparse weight vector with its explicit support.
struct PrimalState {
  PrimalState() = default;
  explicit PrimalState(DenseVector weights)
      : w(std::move(weights)), support(sparsedual::support(w)) {}

  DenseVector w;
  IndexSet support;
};

// Dual vector alpha plus the running accumulator wtilde = -(1/(lambda N)) sum alpha_i x_i.
// Coordinate updates adjust wtilde incrementally; after resync_every coordinate
// updates the accumulator is recomputed from scratch to bound drift.
class DualState {
 public:
  explicit DualState(const ProblemInstance& inst);
  DualState(const ProblemInstance& inst, std::vector<double> alpha);

  const std::vector<double>& alpha() const { return alpha_; }
  double alpha(Index i) const { return alpha_[static_cast<std::size_t>(i)]; }
  const DenseVector& accumulator() const { return wtilde_; }

  void set_resync_every(Index updates);
  void update_coordinate(Index i, double value);
  void resync();

 private:
  const ProblemInstance* inst_;
  std::vector<double> alpha_;
  DenseVector wtilde_;
  Index resync_every_ = 1000;
  Index updates_since_resync_ = 0;
};

// Saddle-point certificate: subdifferential membership (b), primal-dual link
// through hard thresholding (c), the support-stationarity reformulation of (c),
// and the primal-dual gap. Global optimality is only ever implied by gap <= tol.
struct CertificateReport {
  double tol = 0.0;
  bool b_ok = false;
  bool c_ok = false;
  bool remark_ok = false;
  bool gap_ok = false;
  bool optimal_certified = false;
  double b_residual = 0.0;
  double c_residual = 0.0;
  double remark_support_residual = 0.0;
  double remark_margin = 0.0;
  double gap = 0.0;

  nlohmann::json to_json() const;
};

// (1/N) sum l(w'x_i, y_i) + (lambda/2) ||w||^2
double primal_value(const ProblemInstance& inst, const DenseVector& w);

// (1/N) sum l'(w'x_i, y_i) x_i + lambda w, with the deterministic loss
// subgradient selections.
DenseVector primal_subgradient(const ProblemInstance& inst, const DenseVector& w);

// w(alpha) = H_k(-(1/(lambda N)) sum alpha_i x_i)
PrimalState primal_from_dual(const ProblemInstance& inst, const std::vector<double>& alpha);

// (1/N) sum -l*(alpha_i) - (lambda/2) ||w(alpha)||^2; throws on infeasible alpha.
double dual_value(const ProblemInstance& inst, const std::vector<double>& alpha);

// g_i = (1/N)(x_i'w - l*'(alpha_i)); callers may pass a stale w.
std::vector<double> dual_supergradient(const ProblemInstance& inst,
                                       const std::vector<double>& alpha,
                                       const DenseVector& w);

// P(w) - D(alpha)
double duality_gap(const ProblemInstance& inst, const DenseVector& w,
                   const std::vector<double>& alpha);

// (1/N) sum (l(w'x_i) + l*(alpha_i) - alpha_i w'x_i); equals duality_gap when
// w = primal_from_dual(alpha).
double gap_closed_form(const ProblemInstance& inst, const DenseVector& w,
                       const std::vector<double>& alpha);

// min_abs_on_support(w) - (1/lambda) ||primal_subgradient(w)||_inf; throws on w = 0.
double margin_epsilon_bar(const ProblemInstance& inst, const DenseVector& w);

// tol is an absolute residual threshold by default; with scale_relative set it
// is multiplied by max(1, ||wtilde(alpha)||_inf) before any comparison. The
// report records the effective threshold actually used.
CertificateReport certify_saddle_point(const ProblemInstance& inst, const DenseVector& w,
                                       const std::vector<double>& alpha, double tol,
                                       bool scale_relative = false);

// Brute-force (sigma_max(X,s), sigma_min(X,s)) over all feature supports of
// size 1..s of the row-restricted data matrix; the enumerated support count is
// capped at 1e5.
std::pair<double, double> restricted_singular_values(const ProblemInstance& inst, Index s);

// margins[i] = w'x_i
std::vector<double> compute_margins(const ProblemInstance& inst, const DenseVector& w);

}  // namespace sparsedual
