#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsedual/objective.hpp"
#include "sparsedual/types.hpp"

namespace sparsedual {

enum class StepSchedule { theorem_mu, constant, inv_t };

StepSchedule step_schedule_from_id(const std::string& id);
std::string step_schedule_id(StepSchedule schedule);

struct SolverConfig {
  Index max_iters = 100000;
  StepSchedule schedule = StepSchedule::theorem_mu;
  double eta0 = 1.0;
  double stop_gap_tol = 0.0;
  double stop_rel_primal_tol = 1e-4;
  std::uint64_t seed = 0;
  Index blocks = 1;
  Index record_every = 100;
  Index resync_every = 1000;
  std::optional<double> target_primal;

  // dual_method selects the checks specific to dual ascent (block count,
  // theorem_mu availability for the instance's loss).
  void validate(const ProblemInstance& inst, bool dual_method) const;
  nlohmann::json to_json() const;
};

// m disjoint, ascending-sorted index blocks covering [0, n); first blocks
// take the remainder so sizes differ by at most one.
struct BlockPartition {
  std::vector<std::vector<Index>> blocks;

  Index block_count() const { return static_cast<Index>(blocks.size()); }
  void validate(Index n) const;
};

BlockPartition make_partition(Index n, Index m, std::uint64_t seed);

struct TraceRow {
  Index t = 0;
  double seconds = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  Index nnz = 0;
  std::uint64_t support_hash = 0;
  double alpha_ref_dist = 0.0;  // ||alpha - alpha_ref||, NaN without a reference
};

struct RunReport {
  std::string solver_id;
  SolverConfig config;
  std::vector<TraceRow> rows;
  DenseVector final_w;
  std::vector<double> final_alpha;  // empty for primal-only solvers
  IndexSet final_support;
  double final_primal = 0.0;
  double final_dual = 0.0;  // NaN for primal-only solvers
  double final_gap = 0.0;   // NaN for primal-only solvers
  Index iterations = 0;
  std::string stop_reason;  // max_iters | gap_tol | rel_primal | target_primal
  bool diverged_flag = false;

  // Columns: t, seconds, primal, dual, gap, nnz, support_hash.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Dual ascent with hard thresholding; batch variant (every coordinate each
// iteration). alpha_ref, when given, fills the alpha_ref_dist trace column.
RunReport diht(const ProblemInstance& inst, const SolverConfig& config,
               const std::vector<double>* alpha_ref = nullptr);

// Stochastic block variant: one uniformly drawn block per iteration
// (with replacement), incremental accumulator updates. With one block the
// trace is bitwise identical to diht under the same config.
RunReport sdiht(const ProblemInstance& inst, const SolverConfig& config,
                const BlockPartition& partition,
                const std::vector<double>* alpha_ref = nullptr);

// Projected gradient baseline: w <- H_k(w - eta * P'(w)).
RunReport iht_baseline(const ProblemInstance& inst, const SolverConfig& config);

// Hard thresholding pursuit: IHT support selection plus a debias solve of P
// restricted to the chosen support (inner tolerance 1e-8; closed form for
// squared loss when the support is small).
RunReport htp_baseline(const ProblemInstance& inst, const SolverConfig& config);

struct OracleResult {
  DenseVector w;
  double primal = 0.0;
  IndexSet support;
};

// Global minimizer by support enumeration; requires C(d, k) <= 1e5.
// Ties resolve to the first support in lexicographic order.
OracleResult brute_force_oracle(const ProblemInstance& inst);

// theorem_mu: blocks * n / (mu * (t+1)); constant: eta0; inv_t: eta0 / (t+1).
double step_size(Index t, const SolverConfig& config, const ProblemInstance& inst);

// Dispatch by id: diht | sdiht | iht | htp. sdiht derives its partition from
// config.blocks and config.seed.
RunReport run_solver(const ProblemInstance& inst, const std::string& solver_id,
                     const SolverConfig& config);

struct SolverSetup {
  std::string solver_id;
  SolverConfig config;
};

// Constant schedule with eta0 == 0 means "pick the step for this instance":
// suggested_dual_step for dual solvers, suggested_iht_step otherwise.
SolverConfig resolve_auto_step(const ProblemInstance& inst, const SolverSetup& setup);

RunReport run_setup(const ProblemInstance& inst, const SolverSetup& setup);

// Largest singular value of the d x n data matrix via power iteration.
double power_sigma_max(const ProblemInstance& inst, Index iters = 200);

// Constant dual step lambda*n^2 / (lambda*n*mu + sigma_max^2), a stability
// bound for the batch dual ascent on smooth losses.
double suggested_dual_step(const ProblemInstance& inst);

// 0.95 / L with L the primal smoothness bound c*sigma_max^2/n + lambda.
double suggested_iht_step(const ProblemInstance& inst);

}  // namespace sparsedual
