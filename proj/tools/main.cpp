#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "sparsedual/data.hpp"
#include "sparsedual/format.hpp"
#include "sparsedual/metrics.hpp"
#include "sparsedual/objective.hpp"
#include "sparsedual/rng.hpp"
#include "sparsedual/solvers.hpp"

namespace fs = std::filesystem;
namespace sd = sparsedual;

namespace {

std::string iso_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string resolve_out_dir(const std::string& cli_out, const std::string& cfg_out) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg_out.empty()) return cfg_out;
  if (const char* env = std::getenv("SPARSEDUAL_OUT_DIR"); env && *env) return env;
  return ".";
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string model_text(const sd::DenseVector& w) {
  std::string out;
  for (sd::Index j = 0; j < w.dim(); ++j) {
    if (w[j] != 0.0) {
      out += sd::format_index(j);
      out += ':';
      out += sd::format_double(w[j]);
      out += '\n';
    }
  }
  return out;
}

std::string alpha_text(const std::vector<double>& alpha) {
  std::string out;
  for (double a : alpha) {
    out += sd::format_double(a);
    out += '\n';
  }
  return out;
}

sd::DenseVector load_model(const std::string& path, sd::Index dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  sd::DenseVector w(dim);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    long long j = -1;
    double v = 0.0;
    if (colon == std::string::npos || !sd::parse_long(line.substr(0, colon), j) ||
        !sd::parse_double(line.substr(colon + 1), v)) {
      throw std::runtime_error("model file line " + std::to_string(line_no) +
                               ": expected 'index:value'");
    }
    if (j < 0 || j >= dim) {
      throw std::runtime_error("model file line " + std::to_string(line_no) +
                               ": index out of range");
    }
    w[j] = v;
  }
  return w;
}

std::vector<double> load_alpha(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open alpha file: " + path);
  std::vector<double> alpha;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    double v = 0.0;
    if (!sd::parse_double(line, v)) {
      throw std::runtime_error("alpha file line " + std::to_string(line_no) +
                               ": expected one number per line");
    }
    alpha.push_back(v);
  }
  return alpha;
}

int run_synth(const sd::SyntheticSpec& spec, bool binarize, bool normalize,
              const std::string& out_prefix) {
  sd::SyntheticData data = sd::generate_synthetic(spec);
  if (binarize) sd::binarize_labels(data.data.labels);
  if (normalize) sd::normalize_rows(data.data);

  const std::string data_path = out_prefix + ".libsvm";
  const std::string sidecar_path = out_prefix + ".json";
  sd::write_libsvm(data_path, data.data.samples, data.data.labels);
  nlohmann::json sidecar{{"d", spec.d},
                         {"k_true", spec.k_true},
                         {"n", spec.n},
                         {"noise_sd", spec.noise_sd},
                         {"off_diag", spec.off_diag},
                         {"seed", spec.seed},
                         {"binarize_labels", binarize},
                         {"normalize_rows", normalize},
                         {"gaussian_sampler", sd::Rng::sampler_name()},
                         {"true_w", data.true_w.values()}};
  write_text(sidecar_path, sidecar.dump(2) + "\n");
  std::cout << "wrote " << data_path << " and " << sidecar_path << "\n";
  return 0;
}

int run_train(const std::string& config_path, const std::optional<std::uint64_t>& seed_override,
              const std::string& out_override) {
  sd::cli::ExperimentConfig cfg = sd::cli::load_config_file(config_path, "train");
  if (seed_override) {
    cfg.solver.seed = *seed_override;
    cfg.echo["seed"] = *seed_override;
  }
  const std::string out_dir = resolve_out_dir(out_override, cfg.out_dir);
  cfg.echo["out_dir"] = out_dir;
  const std::string started = iso_timestamp();

  sd::cli::BuiltData built = sd::cli::build_dataset(cfg.data);
  const bool have_truth = built.true_w.dim() > 0;
  sd::ProblemInstance inst(std::move(built.data), sd::cli::make_loss(cfg.data), cfg.data.lambda,
                           cfg.data.k);
  const sd::RunReport report = sd::run_setup(inst, {cfg.solver_id, cfg.solver});

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "trace.csv", report.to_csv());
  write_text(fs::path(out_dir) / "model.txt", model_text(report.final_w));
  if (!report.final_alpha.empty()) {
    write_text(fs::path(out_dir) / "alpha.txt", alpha_text(report.final_alpha));
  }

  nlohmann::json report_json{
      {"config", cfg.echo},
      {"run", report.to_json()},
      {"dataset", {{"n", inst.n()}, {"dim", inst.dim()}, {"rows_normalized", inst.rows_normalized()}}},
      {"timestamps", {{"started_at", started}, {"finished_at", iso_timestamp()}}}};
  if (have_truth) {
    report_json["metrics"] = {
        {"estimation_error", sd::estimation_error(report.final_w, built.true_w)},
        {"support_recovered", sd::support_recovery_success(report.final_w, built.true_w)}};
  }
  write_text(fs::path(out_dir) / "report.json", report_json.dump(2) + "\n");

  std::cout << "solver=" << report.solver_id << " iterations=" << report.iterations
            << " primal=" << sd::format_double(report.final_primal)
            << " dual=" << sd::format_double(report.final_dual)
            << " gap=" << sd::format_double(report.final_gap) << " stop=" << report.stop_reason
            << "\n";
  std::cout << "wrote " << (fs::path(out_dir) / "report.json").string() << "\n";
  return 0;
}

sd::SolverConfig bench_config_for(const sd::cli::ExperimentConfig& cfg, const std::string& id) {
  sd::SolverConfig sc = cfg.solver;
  const auto it = cfg.bench.eta0_by_solver.find(id);
  sc.eta0 = it == cfg.bench.eta0_by_solver.end() ? 0.0 : it->second;
  if (id != "sdiht") sc.blocks = 1;
  return sc;
}

int run_bench(const std::string& config_path, const std::optional<std::uint64_t>& seed_override,
              const std::string& out_override) {
  sd::cli::ExperimentConfig cfg = sd::cli::load_config_file(config_path, "bench");
  if (seed_override) {
    cfg.solver.seed = *seed_override;
    cfg.echo["seed"] = *seed_override;
  }
  const std::string out_dir = resolve_out_dir(out_override, cfg.out_dir);
  cfg.echo["out_dir"] = out_dir;
  const std::string started = iso_timestamp();
  const sd::LossModel loss = sd::cli::make_loss(cfg.data);

  std::string csv;
  nlohmann::json results = nlohmann::json::array();

  if (cfg.bench.mode == "pssr") {
    csv = "solver,n,lambda_selected,pssr,mean_estimation_error\n";
    for (sd::Index n : cfg.bench.n_grid) {
      sd::TrialBatch batch;
      batch.validation_count = cfg.bench.validation_replicates;
      for (sd::Index r = 0; r < cfg.bench.replicates; ++r) {
        sd::SyntheticSpec spec = cfg.data.synth;
        spec.n = n;
        spec.seed = cfg.data.synth.seed + static_cast<std::uint64_t>(r);
        sd::SyntheticData rep = sd::generate_synthetic(spec);
        if (cfg.data.binarize_labels) sd::binarize_labels(rep.data.labels);
        if (cfg.data.normalize_rows) sd::normalize_rows(rep.data);
        batch.replicates.push_back(std::move(rep));
      }
      for (const std::string& id : cfg.bench.solvers) {
        const sd::SolverSetup setup{id, bench_config_for(cfg, id)};
        const sd::PssrResult res = sd::pssr(batch, setup, loss, cfg.data.k,
                                            cfg.bench.lambda_grid);
        csv += id;
        csv += ',';
        csv += sd::format_index(n);
        csv += ',';
        csv += sd::format_double(res.lambda_selected);
        csv += ',';
        csv += sd::format_double(res.pssr);
        csv += ',';
        csv += sd::format_double(res.mean_estimation_error);
        csv += '\n';
        nlohmann::json entry = res.to_json();
        entry["solver"] = id;
        entry["n"] = n;
        results.push_back(std::move(entry));
      }
    }
  } else {
    sd::cli::BuiltData built = sd::cli::build_dataset(cfg.data);
    sd::ProblemInstance inst(std::move(built.data), loss, cfg.data.lambda, cfg.data.k);
    const sd::SolverSetup reference{cfg.bench.reference_solver,
                                    bench_config_for(cfg, cfg.bench.reference_solver)};
    std::vector<sd::SolverSetup> contenders;
    for (const std::string& id : cfg.bench.solvers) {
      contenders.push_back(sd::SolverSetup{id, bench_config_for(cfg, id)});
    }
    const sd::TimeToTargetTable table =
        sd::time_to_target(inst, reference, contenders, cfg.bench.target_cap_iters);
    csv = table.to_csv();
    results = table.to_json();
  }

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "bench.csv", csv);
  nlohmann::json bench_json{
      {"config", cfg.echo},
      {"results", results},
      {"timestamps", {{"started_at", started}, {"finished_at", iso_timestamp()}}}};
  write_text(fs::path(out_dir) / "bench.json", bench_json.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "bench.csv").string() << "\n";
  return 0;
}

int run_certify(const std::string& config_path, const std::string& out_override) {
  sd::cli::ExperimentConfig cfg = sd::cli::load_config_file(config_path, "certify");
  const std::string out_dir = resolve_out_dir(out_override, cfg.out_dir);
  cfg.echo["out_dir"] = out_dir;
  const std::string started = iso_timestamp();

  sd::cli::BuiltData built = sd::cli::build_dataset(cfg.data);
  sd::ProblemInstance inst(std::move(built.data), sd::cli::make_loss(cfg.data), cfg.data.lambda,
                           cfg.data.k);
  const sd::DenseVector w = load_model(cfg.certify.model_path, inst.dim());
  const std::vector<double> alpha = load_alpha(cfg.certify.alpha_path);
  if (static_cast<sd::Index>(alpha.size()) != inst.n()) {
    throw std::runtime_error("alpha file holds " + std::to_string(alpha.size()) +
                             " values but the dataset has " + std::to_string(inst.n()) +
                             " samples");
  }

  const sd::CertificateReport rep =
      sd::certify_saddle_point(inst, w, alpha, cfg.certify.certify_tol);
  auto line = [](const char* name, bool ok, const std::string& detail) {
    std::cout << "[" << name << "] " << (ok ? "PASS" : "FAIL") << " " << detail << "\n";
  };
  line("subdifferential", rep.b_ok, "residual=" + sd::format_double(rep.b_residual));
  line("threshold-consistency", rep.c_ok, "residual=" + sd::format_double(rep.c_residual));
  line("support-margin", rep.remark_ok,
       "support_residual=" + sd::format_double(rep.remark_support_residual) +
           " margin=" + sd::format_double(rep.remark_margin));
  line("gap", rep.gap_ok, "gap=" + sd::format_double(rep.gap));
  std::cout << "certified: " << (rep.optimal_certified ? "yes" : "no")
            << " (tol=" << sd::format_double(rep.tol) << ")\n";

  fs::create_directories(out_dir);
  nlohmann::json cert_json{
      {"config", cfg.echo},
      {"certificate", rep.to_json()},
      {"timestamps", {{"started_at", started}, {"finished_at", iso_timestamp()}}}};
  write_text(fs::path(out_dir) / "certificate.json", cert_json.dump(2) + "\n");
  return rep.optimal_certified ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-duality optimization toolkit"};
  app.require_subcommand(1);

  int threads = 1;
  bool deterministic = false;
  app.add_option("--threads", threads, "reserved; runs are single-threaded");
  app.add_flag("--deterministic", deterministic,
               "reserved; runs are deterministic for fixed seeds by default");

  sd::SyntheticSpec spec;
  bool binarize = false;
  bool normalize = false;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->fallthrough();
  synth->add_option("--d", spec.d, "feature dimension")->required();
  synth->add_option("--k-true", spec.k_true, "true support size")->required();
  synth->add_option("--n", spec.n, "sample count")->required();
  synth->add_option("--noise-sd", spec.noise_sd, "response noise standard deviation");
  synth->add_option("--off-diag", spec.off_diag, "off-diagonal covariance of the first block");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_flag("--binarize", binarize, "turn responses into -1/+1 labels");
  synth->add_flag("--normalize", normalize, "scale rows with norm > 1 to unit norm");
  synth->add_option("--out", synth_out, "output path prefix")->required();

  std::string train_config, train_out;
  std::uint64_t train_seed = 0;
  CLI::App* train = app.add_subcommand("train", "run a solver described by a config file");
  train->fallthrough();
  train->add_option("--config", train_config, "JSON config path")->required();
  CLI::Option* train_seed_opt =
      train->add_option("--seed", train_seed, "override the solver seed");
  train->add_option("--out", train_out, "output directory");

  std::string bench_config, bench_out;
  std::uint64_t bench_seed = 0;
  CLI::App* bench = app.add_subcommand("bench", "run a benchmark protocol");
  bench->fallthrough();
  bench->add_option("--config", bench_config, "JSON config path")->required();
  CLI::Option* bench_seed_opt =
      bench->add_option("--seed", bench_seed, "override the solver seed");
  bench->add_option("--out", bench_out, "output directory");

  std::string certify_config, certify_out;
  CLI::App* certify = app.add_subcommand("certify", "check a saddle-point certificate");
  certify->fallthrough();
  certify->add_option("--config", certify_config, "JSON config path")->required();
  certify->add_option("--out", certify_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return run_synth(spec, binarize, normalize, synth_out);
    if (train->parsed()) {
      const std::optional<std::uint64_t> seed_override =
          train_seed_opt->count() ? std::optional<std::uint64_t>(train_seed) : std::nullopt;
      return run_train(train_config, seed_override, train_out);
    }
    if (bench->parsed()) {
      const std::optional<std::uint64_t> seed_override =
          bench_seed_opt->count() ? std::optional<std::uint64_t>(bench_seed) : std::nullopt;
      return run_bench(bench_config, seed_override, bench_out);
    }
    if (certify->parsed()) return run_certify(certify_config, certify_out);
  } catch (const sd::cli::ConfigError& e) {
    for (const std::string& issue : e.issues()) std::cerr << "config error: " << issue << "\n";
    return 2;
  } catch (const sd::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
