#include "sparsedual/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsedual/format.hpp"
#include "sparsedual/vecops.hpp"

namespace sparsedual {

namespace {

// Truncated run on the same instance so the timed run starts warm (page
// cache, allocator, branch predictors).
void warm_up(const ProblemInstance& inst, const SolverSetup& setup) {
  SolverConfig cfg = resolve_auto_step(inst, setup);
  cfg.max_iters = std::min<Index>(cfg.max_iters, 3);
  cfg.target_primal.reset();
  run_solver(inst, setup.solver_id, cfg);
}

}  // namespace

void TrialBatch::validate() const {
  if (replicates.empty()) throw std::invalid_argument("TrialBatch: no replicates");
  if (validation_count < 0 || validation_count > static_cast<Index>(replicates.size())) {
    throw std::invalid_argument("TrialBatch: validation_count outside [0, replicates]");
  }
}

double estimation_error(const DenseVector& w, const DenseVector& true_w) {
  if (w.dim() != true_w.dim()) throw std::invalid_argument("estimation_error: dim mismatch");
  double diff = 0.0;
  double ref = 0.0;
  for (Index j = 0; j < w.dim(); ++j) {
    const double d = w[j] - true_w[j];
    diff += d * d;
    ref += true_w[j] * true_w[j];
  }
  if (ref == 0.0) throw std::invalid_argument("estimation_error: true_w is zero");
  return std::sqrt(diff) / std::sqrt(ref);
}

bool support_recovery_success(const DenseVector& w, const DenseVector& true_w) {
  if (w.dim() != true_w.dim()) {
    throw std::invalid_argument("support_recovery_success: dim mismatch");
  }
  return support(w) == support(true_w);
}

nlohmann::json PssrResult::to_json() const {
  return nlohmann::json{{"lambda_selected", lambda_selected},
                        {"pssr", pssr},
                        {"mean_estimation_error", mean_estimation_error},
                        {"lambda_grid", lambda_grid},
                        {"validation_mean_error", validation_mean_error},
                        {"selection_statistic", "mean_estimation_error"}};
}

PssrResult pssr(const TrialBatch& batch, const SolverSetup& setup, const LossModel& loss,
                Index k, const std::vector<double>& lambda_grid) {
  batch.validate();
  if (lambda_grid.empty()) throw std::invalid_argument("pssr: empty lambda grid");
  if (batch.evaluation_count() < 1) {
    throw std::invalid_argument("pssr: no evaluation replicates");
  }

  PssrResult res;
  res.lambda_grid = lambda_grid;

  auto error_at = [&](const SyntheticData& rep, double lambda) {
    ProblemInstance inst(rep.data, loss, lambda, k);
    const RunReport report = run_setup(inst, setup);
    return estimation_error(report.final_w, rep.true_w);
  };

  if (lambda_grid.size() == 1) {
    res.lambda_selected = lambda_grid.front();
  } else {
    if (batch.validation_count < 1) {
      throw std::invalid_argument("pssr: lambda selection needs validation replicates");
    }
    double best_err = 0.0;
    for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
      double sum = 0.0;
      for (Index r = 0; r < batch.validation_count; ++r) {
        sum += error_at(batch.replicates[static_cast<std::size_t>(r)], lambda_grid[g]);
      }
      const double mean = sum / static_cast<double>(batch.validation_count);
      res.validation_mean_error.push_back(mean);
      if (g == 0 || mean < best_err) {
        best_err = mean;
        res.lambda_selected = lambda_grid[g];
      }
    }
  }

  Index successes = 0;
  double err_sum = 0.0;
  for (Index r = batch.validation_count; r < static_cast<Index>(batch.replicates.size()); ++r) {
    const SyntheticData& rep = batch.replicates[static_cast<std::size_t>(r)];
    ProblemInstance inst(rep.data, loss, res.lambda_selected, k);
    const RunReport report = run_setup(inst, setup);
    err_sum += estimation_error(report.final_w, rep.true_w);
    if (support_recovery_success(report.final_w, rep.true_w)) ++successes;
  }
  res.pssr = static_cast<double>(successes) / static_cast<double>(batch.evaluation_count());
  res.mean_estimation_error = err_sum / static_cast<double>(batch.evaluation_count());
  return res;
}

std::string TimeToTargetTable::to_csv() const {
  std::string out = "solver,seconds,iterations,reached,final_primal\n";
  for (const TimeToTargetRow& r : rows) {
    out += r.solver;
    out += ',';
    out += format_double(r.seconds);
    out += ',';
    out += format_index(r.iterations);
    out += ',';
    out += r.reached ? "true" : "false";
    out += ',';
    out += format_double(r.final_primal);
    out += '\n';
  }
  return out;
}

nlohmann::json TimeToTargetTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const TimeToTargetRow& r : rows) {
    rows_json.push_back({{"solver", r.solver},
                         {"seconds", r.seconds},
                         {"iterations", r.iterations},
                         {"reached", r.reached},
                         {"final_primal", r.final_primal}});
  }
  return nlohmann::json{{"reference_solver", reference_solver},
                        {"target_primal", target_primal},
                        {"rows", rows_json}};
}

TimeToTargetTable time_to_target(const ProblemInstance& inst, const SolverSetup& reference,
                                 const std::vector<SolverSetup>& contenders,
                                 Index contender_cap) {
  if (contender_cap < 1) throw std::invalid_argument("time_to_target: contender_cap must be >= 1");

  TimeToTargetTable table;
  table.reference_solver = reference.solver_id;

  warm_up(inst, reference);
  const RunReport ref_report = run_setup(inst, reference);
  table.target_primal = ref_report.final_primal;
  table.rows.push_back(TimeToTargetRow{reference.solver_id,
                                       ref_report.rows.back().seconds, ref_report.iterations,
                                       true, ref_report.final_primal});

  for (const SolverSetup& contender : contenders) {
    SolverSetup timed = contender;
    timed.config.target_primal = table.target_primal;
    timed.config.stop_gap_tol = 0.0;
    timed.config.stop_rel_primal_tol = 0.0;
    timed.config.max_iters = contender_cap;
    warm_up(inst, timed);
    const RunReport report = run_setup(inst, timed);
    table.rows.push_back(TimeToTargetRow{contender.solver_id, report.rows.back().seconds,
                                         report.iterations,
                                         report.final_primal <= table.target_primal,
                                         report.final_primal});
  }
  return table;
}

}  // namespace sparsedual
