#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sparsedual::cli {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

const std::set<std::string> kSolverIds = {"diht", "sdiht", "iht", "htp"};

// Typed key extraction that records every violation instead of stopping at
// the first one; keys are marked consumed even when malformed so the unknown
// key pass only reports genuinely unrecognized names.
class Reader {
 public:
  explicit Reader(const nlohmann::json& j) : j_(&j) {}

  bool present(const std::string& key) const { return j_->contains(key); }
  void issue(const std::string& text) { issues_.push_back(text); }

  const nlohmann::json* take(const std::string& key) {
    consumed_.insert(key);
    const auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback, bool required = false) {
    const nlohmann::json* v = take(key);
    if (!v) {
      if (required) issue("missing required key '" + key + "'");
      return fallback;
    }
    if (!v->is_number()) {
      issue("key '" + key + "' must be a number");
      return fallback;
    }
    return v->get<double>();
  }

  Index integer(const std::string& key, Index fallback, bool required = false) {
    const nlohmann::json* v = take(key);
    if (!v) {
      if (required) issue("missing required key '" + key + "'");
      return fallback;
    }
    if (v->is_number_integer() || v->is_number_unsigned()) return v->get<Index>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (std::isfinite(d) && d == std::floor(d)) return static_cast<Index>(d);
    }
    issue("key '" + key + "' must be an integer");
    return fallback;
  }

  std::uint64_t seed_value(const std::string& key, std::uint64_t fallback) {
    const nlohmann::json* v = take(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
    issue("key '" + key + "' must be a nonnegative integer");
    return fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const nlohmann::json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      issue("key '" + key + "' must be a boolean");
      return fallback;
    }
    return v->get<bool>();
  }

  std::string str(const std::string& key, const std::string& fallback, bool required = false) {
    const nlohmann::json* v = take(key);
    if (!v) {
      if (required) issue("missing required key '" + key + "'");
      return fallback;
    }
    if (!v->is_string()) {
      issue("key '" + key + "' must be a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  std::vector<double> number_array(const std::string& key, bool required) {
    const nlohmann::json* v = take(key);
    std::vector<double> out;
    if (!v) {
      if (required) issue("missing required key '" + key + "'");
      return out;
    }
    if (!v->is_array() || v->empty()) {
      issue("key '" + key + "' must be a nonempty array of numbers");
      return out;
    }
    for (const auto& e : *v) {
      if (!e.is_number()) {
        issue("key '" + key + "' must contain numbers only");
        return {};
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<Index> integer_array(const std::string& key, bool required) {
    const nlohmann::json* v = take(key);
    std::vector<Index> out;
    if (!v) {
      if (required) issue("missing required key '" + key + "'");
      return out;
    }
    if (!v->is_array() || v->empty()) {
      issue("key '" + key + "' must be a nonempty array of integers");
      return out;
    }
    for (const auto& e : *v) {
      if (!e.is_number_integer() && !e.is_number_unsigned()) {
        issue("key '" + key + "' must contain integers only");
        return {};
      }
      out.push_back(e.get<Index>());
    }
    return out;
  }

  std::vector<std::string> string_array(const std::string& key, bool required) {
    const nlohmann::json* v = take(key);
    std::vector<std::string> out;
    if (!v) {
      if (required) issue("missing required key '" + key + "'");
      return out;
    }
    if (!v->is_array() || v->empty()) {
      issue("key '" + key + "' must be a nonempty array of strings");
      return out;
    }
    for (const auto& e : *v) {
      if (!e.is_string()) {
        issue("key '" + key + "' must contain strings only");
        return {};
      }
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void forbid(const std::string& key, const std::string& why) {
    if (present(key)) {
      consumed_.insert(key);
      issue("key '" + key + "' " + why);
    }
  }

  void check_unknown() {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      if (!consumed_.count(it.key())) issue("unknown key '" + it.key() + "'");
    }
  }

  std::vector<std::string>& issues() { return issues_; }

 private:
  const nlohmann::json* j_;
  std::set<std::string> consumed_;
  std::vector<std::string> issues_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error("config error: " + join(issues, "; ")), issues_(std::move(issues)) {}

ExperimentConfig parse_config(const nlohmann::json& raw, const std::string& command) {
  if (command != "train" && command != "bench" && command != "certify") {
    throw std::logic_error("parse_config: bad command");
  }
  if (!raw.is_object()) throw ConfigError({"config root must be a JSON object"});

  Reader r(raw);
  ExperimentConfig cfg;
  cfg.command = command;

  const Index schema = r.integer("schema_version", -1, true);
  if (r.present("schema_version") && schema != 1) r.issue("schema_version must be 1");

  // Bench mode first: it decides which dataset/loss keys apply.
  const bool is_bench = command == "bench";
  bool pssr_mode = false;
  if (is_bench) {
    cfg.bench.mode = r.str("bench_mode", "", true);
    if (r.present("bench_mode") && cfg.bench.mode != "pssr" &&
        cfg.bench.mode != "time_to_target") {
      r.issue("bench_mode must be 'pssr' or 'time_to_target'");
    }
    pssr_mode = cfg.bench.mode == "pssr";
  } else {
    r.forbid("bench_mode", "only applies to the bench command");
  }

  // Dataset section.
  cfg.data.dataset = r.str("dataset", "", true);
  const bool is_libsvm = cfg.data.dataset == "libsvm";
  const bool is_synth = cfg.data.dataset == "synthetic";
  if (r.present("dataset") && !is_libsvm && !is_synth) {
    r.issue("dataset must be 'synthetic' or 'libsvm'");
  }
  if (pssr_mode && is_libsvm) {
    r.issue("bench_mode 'pssr' needs synthetic data (true weights are required)");
  }

  if (is_libsvm) {
    cfg.data.libsvm_path = r.str("libsvm_path", "", true);
    cfg.data.libsvm_dim = r.integer("libsvm_dim", -1);
    if (r.present("libsvm_dim") && cfg.data.libsvm_dim < 1) {
      r.issue("key 'libsvm_dim' must be >= 1");
    }
    for (const char* key : {"synthetic_d", "synthetic_k_true", "synthetic_n",
                            "synthetic_noise_sd", "synthetic_off_diag", "synthetic_seed"}) {
      r.forbid(key, "does not apply to dataset 'libsvm'");
    }
  } else {
    r.forbid("libsvm_path", "does not apply to dataset 'synthetic'");
    r.forbid("libsvm_dim", "does not apply to dataset 'synthetic'");
    cfg.data.synth.d = r.integer("synthetic_d", 0, is_synth);
    cfg.data.synth.k_true = r.integer("synthetic_k_true", 0, is_synth);
    if (pssr_mode) {
      r.forbid("synthetic_n", "is replaced by 'n_grid' in bench_mode 'pssr'");
    } else {
      cfg.data.synth.n = r.integer("synthetic_n", 0, is_synth);
    }
    cfg.data.synth.noise_sd = r.number("synthetic_noise_sd", 1.0);
    cfg.data.synth.off_diag = r.number("synthetic_off_diag", 0.25);
    cfg.data.synth.seed = r.seed_value("synthetic_seed", 0);
    if (is_synth) {
      if (cfg.data.synth.d < 1) r.issue("key 'synthetic_d' must be >= 1");
      if (cfg.data.synth.k_true < 0 || cfg.data.synth.k_true > cfg.data.synth.d) {
        r.issue("key 'synthetic_k_true' must lie in [0, synthetic_d]");
      }
      if (!pssr_mode && cfg.data.synth.n < 1) r.issue("key 'synthetic_n' must be >= 1");
      if (!(cfg.data.synth.noise_sd >= 0.0)) r.issue("key 'synthetic_noise_sd' must be >= 0");
      if (!(cfg.data.synth.off_diag >= 0.0 && cfg.data.synth.off_diag < 1.0)) {
        r.issue("key 'synthetic_off_diag' must lie in [0, 1)");
      }
    }
  }
  cfg.data.binarize_labels = r.boolean("binarize_labels", false);
  cfg.data.normalize_rows = r.boolean("normalize_rows", false);

  // Loss section.
  cfg.data.loss_id = r.str("loss", "", true);
  if (r.present("loss") && cfg.data.loss_id != "squared" && cfg.data.loss_id != "huber" &&
      cfg.data.loss_id != "hinge") {
    r.issue("loss must be one of squared, huber, hinge");
  }
  if (cfg.data.loss_id == "huber") {
    cfg.data.huber_gamma = r.number("huber_gamma", 0.25);
    if (!(cfg.data.huber_gamma > 0.0)) r.issue("key 'huber_gamma' must be > 0");
  } else {
    r.forbid("huber_gamma", "only applies to the huber loss");
  }

  if (pssr_mode) {
    r.forbid("lambda", "is replaced by 'lambda_grid' in bench_mode 'pssr'");
  } else {
    cfg.data.lambda = r.number("lambda", 0.0, true);
    if (r.present("lambda") && !(cfg.data.lambda > 0.0)) r.issue("key 'lambda' must be > 0");
  }
  cfg.data.k = r.integer("k", 0, true);
  if (r.present("k") && cfg.data.k < 1) r.issue("key 'k' must be >= 1");

  // Solver section (train uses all of it; bench shares the base fields).
  if (command == "train") {
    cfg.solver_id = r.str("solver", "", true);
    if (r.present("solver") && !kSolverIds.count(cfg.solver_id)) {
      r.issue("unknown solver '" + cfg.solver_id + "' (valid: diht, sdiht, iht, htp)");
    }
  } else {
    r.forbid("solver", command == "bench" ? "is replaced by 'solvers' in bench configs"
                                          : "does not apply to the certify command");
  }

  const bool solver_keys = command != "certify";
  if (solver_keys) {
    cfg.solver.max_iters = r.integer("max_iters", cfg.solver.max_iters);
    if (cfg.solver.max_iters < 0) r.issue("key 'max_iters' must be >= 0");
    const std::string sched = r.str("step_schedule", step_schedule_id(cfg.solver.schedule));
    try {
      cfg.solver.schedule = step_schedule_from_id(sched);
    } catch (const std::invalid_argument& e) {
      r.issue(e.what());
    }
    cfg.solver.stop_gap_tol = r.number("stop_gap_tol", cfg.solver.stop_gap_tol);
    cfg.solver.stop_rel_primal_tol =
        r.number("stop_rel_primal_tol", cfg.solver.stop_rel_primal_tol);
    if (!(cfg.solver.stop_gap_tol >= 0.0)) r.issue("key 'stop_gap_tol' must be >= 0");
    if (!(cfg.solver.stop_rel_primal_tol >= 0.0)) {
      r.issue("key 'stop_rel_primal_tol' must be >= 0");
    }
    cfg.solver.seed = r.seed_value("seed", 0);
    cfg.solver.blocks = r.integer("blocks", 1);
    if (cfg.solver.blocks < 1) r.issue("key 'blocks' must be >= 1");
    cfg.solver.record_every = r.integer("record_every", 100);
    if (cfg.solver.record_every < 1) r.issue("key 'record_every' must be >= 1");
    cfg.solver.resync_every = r.integer("resync_every", 1000);
    if (cfg.solver.resync_every < 1) r.issue("key 'resync_every' must be >= 1");
    if (command == "train") {
      cfg.solver.eta0 = r.number("eta0", 0.0);
      if (!(cfg.solver.eta0 >= 0.0)) r.issue("key 'eta0' must be >= 0");
      if (r.present("target_primal")) {
        cfg.solver.target_primal = r.number("target_primal", 0.0);
      } else {
        r.take("target_primal");
      }
      if (cfg.solver_id == "diht" && cfg.solver.blocks != 1) {
        r.issue("solver 'diht' requires blocks == 1 (use sdiht for block updates)");
      }
      if (cfg.solver_id != "sdiht" && cfg.solver_id != "diht" && r.present("resync_every")) {
        r.issue("key 'resync_every' only applies to dual solvers");
      }
    } else {
      r.forbid("eta0", "is replaced by per-solver 'eta0_<id>' keys in bench configs");
      r.forbid("target_primal", "is derived from the reference run in bench configs");
    }
  } else {
    for (const char* key : {"max_iters", "step_schedule", "eta0", "stop_gap_tol",
                            "stop_rel_primal_tol", "seed", "blocks", "record_every",
                            "resync_every", "target_primal"}) {
      r.forbid(key, "does not apply to the certify command");
    }
  }

  // Bench-only keys.
  if (is_bench) {
    if (pssr_mode) {
      cfg.bench.n_grid = r.integer_array("n_grid", true);
      for (Index n : cfg.bench.n_grid) {
        if (n < 1) r.issue("key 'n_grid' entries must be >= 1");
      }
      cfg.bench.lambda_grid = r.number_array("lambda_grid", true);
      for (double l : cfg.bench.lambda_grid) {
        if (!(l > 0.0)) r.issue("key 'lambda_grid' entries must be > 0");
      }
      cfg.bench.replicates = r.integer("replicates", 0, true);
      cfg.bench.validation_replicates = r.integer("validation_replicates", 0, true);
      if (r.present("replicates") && cfg.bench.replicates < 1) {
        r.issue("key 'replicates' must be >= 1");
      }
      if (r.present("validation_replicates") &&
          (cfg.bench.validation_replicates < 0 ||
           cfg.bench.validation_replicates >= cfg.bench.replicates)) {
        r.issue("key 'validation_replicates' must lie in [0, replicates)");
      }
      if (cfg.bench.lambda_grid.size() > 1 && cfg.bench.validation_replicates < 1) {
        r.issue("lambda selection over a grid needs validation_replicates >= 1");
      }
      r.forbid("reference_solver", "only applies to bench_mode 'time_to_target'");
      r.forbid("target_cap_iters", "only applies to bench_mode 'time_to_target'");
    } else {
      cfg.bench.reference_solver = r.str("reference_solver", "iht");
      if (!kSolverIds.count(cfg.bench.reference_solver)) {
        r.issue("unknown reference_solver '" + cfg.bench.reference_solver +
                "' (valid: diht, sdiht, iht, htp)");
      }
      cfg.bench.target_cap_iters = r.integer("target_cap_iters", 10000);
      if (cfg.bench.target_cap_iters < 1) r.issue("key 'target_cap_iters' must be >= 1");
      r.forbid("n_grid", "only applies to bench_mode 'pssr'");
      r.forbid("lambda_grid", "only applies to bench_mode 'pssr'");
      r.forbid("replicates", "only applies to bench_mode 'pssr'");
      r.forbid("validation_replicates", "only applies to bench_mode 'pssr'");
    }
    cfg.bench.solvers = r.string_array("solvers", true);
    for (const std::string& id : cfg.bench.solvers) {
      if (!kSolverIds.count(id)) {
        r.issue("unknown solver '" + id + "' in 'solvers' (valid: diht, sdiht, iht, htp)");
      }
    }
    for (const std::string& id : {std::string("diht"), std::string("sdiht"), std::string("iht"),
                                  std::string("htp")}) {
      const std::string key = "eta0_" + id;
      if (r.present(key)) {
        const double v = r.number(key, 0.0);
        if (!(v >= 0.0)) r.issue("key '" + key + "' must be >= 0");
        cfg.bench.eta0_by_solver[id] = v;
      } else {
        r.take(key);
      }
    }
  } else {
    for (const char* key : {"n_grid", "lambda_grid", "replicates", "validation_replicates",
                            "solvers", "reference_solver", "target_cap_iters", "eta0_diht",
                            "eta0_sdiht", "eta0_iht", "eta0_htp"}) {
      r.forbid(key, "only applies to the bench command");
    }
  }

  // Certify-only keys.
  if (command == "certify") {
    cfg.certify.model_path = r.str("model_path", "", true);
    cfg.certify.alpha_path = r.str("alpha_path", "", true);
    cfg.certify.certify_tol = r.number("certify_tol", 1e-6);
    if (!(cfg.certify.certify_tol >= 0.0)) r.issue("key 'certify_tol' must be >= 0");
  } else {
    for (const char* key : {"model_path", "alpha_path", "certify_tol"}) {
      r.forbid(key, "only applies to the certify command");
    }
  }

  cfg.out_dir = r.str("out_dir", "");

  r.check_unknown();
  if (!r.issues().empty()) throw ConfigError(std::move(r.issues()));

  // Effective config echo; feeding this back through parse_config reproduces
  // the run byte for byte.
  nlohmann::json echo;
  echo["schema_version"] = 1;
  echo["dataset"] = cfg.data.dataset;
  if (is_libsvm) {
    echo["libsvm_path"] = cfg.data.libsvm_path;
    if (cfg.data.libsvm_dim >= 1) echo["libsvm_dim"] = cfg.data.libsvm_dim;
  } else {
    echo["synthetic_d"] = cfg.data.synth.d;
    echo["synthetic_k_true"] = cfg.data.synth.k_true;
    if (!pssr_mode) echo["synthetic_n"] = cfg.data.synth.n;
    echo["synthetic_noise_sd"] = cfg.data.synth.noise_sd;
    echo["synthetic_off_diag"] = cfg.data.synth.off_diag;
    echo["synthetic_seed"] = cfg.data.synth.seed;
  }
  echo["binarize_labels"] = cfg.data.binarize_labels;
  echo["normalize_rows"] = cfg.data.normalize_rows;
  echo["loss"] = cfg.data.loss_id;
  if (cfg.data.loss_id == "huber") echo["huber_gamma"] = cfg.data.huber_gamma;
  if (!pssr_mode) echo["lambda"] = cfg.data.lambda;
  echo["k"] = cfg.data.k;
  if (solver_keys) {
    echo["max_iters"] = cfg.solver.max_iters;
    echo["step_schedule"] = step_schedule_id(cfg.solver.schedule);
    echo["stop_gap_tol"] = cfg.solver.stop_gap_tol;
    echo["stop_rel_primal_tol"] = cfg.solver.stop_rel_primal_tol;
    echo["seed"] = cfg.solver.seed;
    echo["blocks"] = cfg.solver.blocks;
    echo["record_every"] = cfg.solver.record_every;
    echo["resync_every"] = cfg.solver.resync_every;
  }
  if (command == "train") {
    echo["solver"] = cfg.solver_id;
    echo["eta0"] = cfg.solver.eta0;
    if (cfg.solver.target_primal) echo["target_primal"] = *cfg.solver.target_primal;
  }
  if (is_bench) {
    echo["bench_mode"] = cfg.bench.mode;
    echo["solvers"] = cfg.bench.solvers;
    if (pssr_mode) {
      echo["n_grid"] = cfg.bench.n_grid;
      echo["lambda_grid"] = cfg.bench.lambda_grid;
      echo["replicates"] = cfg.bench.replicates;
      echo["validation_replicates"] = cfg.bench.validation_replicates;
    } else {
      echo["reference_solver"] = cfg.bench.reference_solver;
      echo["target_cap_iters"] = cfg.bench.target_cap_iters;
    }
    for (const auto& [id, eta] : cfg.bench.eta0_by_solver) echo["eta0_" + id] = eta;
  }
  if (command == "certify") {
    echo["model_path"] = cfg.certify.model_path;
    echo["alpha_path"] = cfg.certify.alpha_path;
    echo["certify_tol"] = cfg.certify.certify_tol;
  }
  if (!cfg.out_dir.empty()) echo["out_dir"] = cfg.out_dir;
  cfg.echo = std::move(echo);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config(j, command);
}

BuiltData build_dataset(const DatasetSection& section) {
  BuiltData out;
  if (section.dataset == "synthetic") {
    SyntheticData sd = generate_synthetic(section.synth);
    out.data = std::move(sd.data);
    out.true_w = std::move(sd.true_w);
  } else {
    LoadedData ld = load_libsvm(section.libsvm_path, section.libsvm_dim);
    out.data.samples = std::move(ld.samples);
    out.data.labels = std::move(ld.labels);
    out.data.dim = ld.dim;
  }
  if (section.binarize_labels) ::sparsedual::binarize_labels(out.data.labels);
  if (section.normalize_rows) ::sparsedual::normalize_rows(out.data);
  return out;
}

LossModel make_loss(const DatasetSection& section) {
  return LossModel::from_id(section.loss_id, section.huber_gamma);
}

}  // namespace sparsedual::cli
