#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sparsedual/data.hpp"
#include "sparsedual/solvers.hpp"

namespace sparsedual {

// Replicate collection for sweep protocols: the first validation_count
// replicates select hyper-parameters, the rest are held out for evaluation.
struct TrialBatch {
  std::vector<SyntheticData> replicates;
  Index validation_count = 0;

  Index evaluation_count() const {
    return static_cast<Index>(replicates.size()) - validation_count;
  }
  void validate() const;
};

// ||w - true_w|| / ||true_w||.
double estimation_error(const DenseVector& w, const DenseVector& true_w);

// Exact support match; two zero vectors count as success.
bool support_recovery_success(const DenseVector& w, const DenseVector& true_w);

struct PssrResult {
  double lambda_selected = 0.0;
  double pssr = 0.0;
  double mean_estimation_error = 0.0;           // on evaluation replicates
  std::vector<double> lambda_grid;
  std::vector<double> validation_mean_error;    // empty for a singleton grid
  nlohmann::json to_json() const;
};

// Selects lambda on the validation replicates by mean estimation error
// (singleton grids skip selection), then reports the exact-recovery fraction
// over the evaluation replicates at the chosen lambda.
PssrResult pssr(const TrialBatch& batch, const SolverSetup& setup, const LossModel& loss,
                Index k, const std::vector<double>& lambda_grid);

struct TimeToTargetRow {
  std::string solver;
  double seconds = 0.0;
  Index iterations = 0;
  bool reached = false;
  double final_primal = 0.0;
};

struct TimeToTargetTable {
  std::string reference_solver;
  double target_primal = 0.0;
  std::vector<TimeToTargetRow> rows;  // reference first

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Runs the reference to its own stopping criterion to fix the target primal
// value, then times each contender until it reaches the target or hits
// contender_cap iterations. Every timed run is preceded by a discarded
// three-iteration warm-up.
TimeToTargetTable time_to_target(const ProblemInstance& inst, const SolverSetup& reference,
                                 const std::vector<SolverSetup>& contenders, Index contender_cap);

}  // namespace sparsedual
