#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsedual/data.hpp"
#include "sparsedual/solvers.hpp"

namespace sparsedual::cli {

// All schema violations found in one pass, not first-error-only.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct DatasetSection {
  std::string dataset;  // synthetic | libsvm
  std::string libsvm_path;
  Index libsvm_dim = -1;  // <1 infers from data
  SyntheticSpec synth;
  bool binarize_labels = false;
  bool normalize_rows = false;
  std::string loss_id = "squared";
  double huber_gamma = 0.25;
  double lambda = 0.0;
  Index k = 0;
};

struct BenchSection {
  std::string mode;  // pssr | time_to_target
  std::vector<Index> n_grid;
  std::vector<double> lambda_grid;
  Index replicates = 0;
  Index validation_replicates = 0;
  std::vector<std::string> solvers;
  std::string reference_solver = "iht";
  std::map<std::string, double> eta0_by_solver;  // absent -> 0 (auto step)
  Index target_cap_iters = 10000;
};

struct CertifySection {
  std::string model_path;
  std::string alpha_path;
  double certify_tol = 1e-6;
};

struct ExperimentConfig {
  std::string command;  // train | bench | certify
  DatasetSection data;
  std::string solver_id = "diht";
  SolverConfig solver;
  BenchSection bench;
  CertifySection certify;
  std::string out_dir;  // empty -> resolve from environment, then "."
  nlohmann::json echo;  // effective config; feeding it back reproduces the run
};

// Fail-closed: unknown keys, type mismatches, and domain violations are all
// collected and thrown together as ConfigError.
ExperimentConfig parse_config(const nlohmann::json& raw, const std::string& command);

ExperimentConfig load_config_file(const std::string& path, const std::string& command);

// Builds the dataset side of a config: generation or load, label binarization,
// row normalization, in that order.
struct BuiltData {
  Dataset data;
  DenseVector true_w;  // dim 0 when unknown (libsvm)
};
BuiltData build_dataset(const DatasetSection& section);

LossModel make_loss(const DatasetSection& section);

}  // namespace sparsedual::cli
