#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sparsedual/data.hpp"
#include "sparsedual/metrics.hpp"
#include "sparsedual/objective.hpp"
#include "sparsedual/solvers.hpp"
#include "sparsedual/vecops.hpp"

namespace py = pybind11;
namespace sd = sparsedual;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

// Owns the instance plus the generating truth (empty for loaded data).
struct Problem {
  std::shared_ptr<sd::ProblemInstance> inst;
  std::vector<double> true_w;
};

Problem make_synthetic(sd::Index d, sd::Index k_true, sd::Index n, double noise_sd,
                       double off_diag, std::uint64_t seed, const std::string& loss,
                       double huber_gamma, double lambda, sd::Index k, bool binarize,
                       bool normalize) {
  sd::SyntheticSpec spec;
  spec.d = d;
  spec.k_true = k_true;
  spec.n = n;
  spec.noise_sd = noise_sd;
  spec.off_diag = off_diag;
  spec.seed = seed;
  sd::SyntheticData data = sd::generate_synthetic(spec);
  if (binarize) sd::binarize_labels(data.data.labels);
  if (normalize) sd::normalize_rows(data.data);
  Problem p;
  p.true_w = data.true_w.values();
  p.inst = std::make_shared<sd::ProblemInstance>(
      std::move(data.data), sd::LossModel::from_id(loss, huber_gamma), lambda, k);
  return p;
}

Problem make_from_libsvm(const std::string& path, const std::string& loss, double huber_gamma,
                         double lambda, sd::Index k, sd::Index dim, bool binarize,
                         bool normalize) {
  sd::LoadedData ld = sd::load_libsvm(path, dim);
  sd::Dataset dataset;
  dataset.samples = std::move(ld.samples);
  dataset.labels = std::move(ld.labels);
  dataset.dim = ld.dim;
  if (binarize) sd::binarize_labels(dataset.labels);
  if (normalize) sd::normalize_rows(dataset);
  Problem p;
  p.inst = std::make_shared<sd::ProblemInstance>(
      std::move(dataset), sd::LossModel::from_id(loss, huber_gamma), lambda, k);
  return p;
}

sd::SolverConfig build_config(sd::Index max_iters, const std::string& step_schedule, double eta0,
                              double stop_gap_tol, double stop_rel_primal_tol,
                              std::uint64_t seed, sd::Index blocks, sd::Index record_every,
                              sd::Index resync_every, std::optional<double> target_primal) {
  sd::SolverConfig cfg;
  cfg.max_iters = max_iters;
  cfg.schedule = sd::step_schedule_from_id(step_schedule);
  cfg.eta0 = eta0;
  cfg.stop_gap_tol = stop_gap_tol;
  cfg.stop_rel_primal_tol = stop_rel_primal_tol;
  cfg.seed = seed;
  cfg.blocks = blocks;
  cfg.record_every = record_every;
  cfg.resync_every = resync_every;
  cfg.target_primal = target_primal;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hard-thresholded dual ascent for sparsity-constrained learning";

  py::register_exception<sd::SolverAbort>(m, "SolverAbort");

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("n", [](const Problem& p) { return p.inst->n(); })
      .def_property_readonly("dim", [](const Problem& p) { return p.inst->dim(); })
      .def_property_readonly("k", [](const Problem& p) { return p.inst->k(); })
      .def_property_readonly("lam", [](const Problem& p) { return p.inst->lambda(); })
      .def_property_readonly("true_w", [](const Problem& p) { return p.true_w; })
      .def("primal_value",
           [](const Problem& p, const std::vector<double>& w) {
             return sd::primal_value(*p.inst, sd::DenseVector(w));
           })
      .def("dual_value",
           [](const Problem& p, const std::vector<double>& alpha) {
             return sd::dual_value(*p.inst, alpha);
           })
      .def("duality_gap",
           [](const Problem& p, const std::vector<double>& w, const std::vector<double>& alpha) {
             return sd::duality_gap(*p.inst, sd::DenseVector(w), alpha);
           })
      .def("certify",
           [](const Problem& p, const std::vector<double>& w, const std::vector<double>& alpha,
              double tol) {
             return json_to_py(
                 sd::certify_saddle_point(*p.inst, sd::DenseVector(w), alpha, tol).to_json());
           },
           py::arg("w"), py::arg("alpha"), py::arg("tol") = 1e-6)
      .def("oracle",
           [](const Problem& p) {
             const sd::OracleResult res = sd::brute_force_oracle(*p.inst);
             py::dict out;
             out["w"] = res.w.values();
             out["primal"] = res.primal;
             out["support"] = res.support.indices();
             return out;
           })
      .def("solve",
           [](const Problem& p, const std::string& solver, sd::Index max_iters,
              const std::string& step_schedule, double eta0, double stop_gap_tol,
              double stop_rel_primal_tol, std::uint64_t seed, sd::Index blocks,
              sd::Index record_every, sd::Index resync_every,
              std::optional<double> target_primal) {
             const sd::SolverConfig cfg =
                 build_config(max_iters, step_schedule, eta0, stop_gap_tol, stop_rel_primal_tol,
                              seed, blocks, record_every, resync_every, target_primal);
             const sd::RunReport report = sd::run_setup(*p.inst, {solver, cfg});
             py::object out = json_to_py(report.to_json());
             out["final_w"] = py::cast(report.final_w.values());
             out["final_alpha"] = py::cast(report.final_alpha);
             return out;
           },
           py::arg("solver"), py::arg("max_iters") = 100000,
           py::arg("step_schedule") = "theorem_mu", py::arg("eta0") = 0.0,
           py::arg("stop_gap_tol") = 0.0, py::arg("stop_rel_primal_tol") = 1e-4,
           py::arg("seed") = 0, py::arg("blocks") = 1, py::arg("record_every") = 100,
           py::arg("resync_every") = 1000, py::arg("target_primal") = py::none());

  m.def("synthetic_problem", &make_synthetic, py::arg("d"), py::arg("k_true"), py::arg("n"),
        py::arg("noise_sd") = 1.0, py::arg("off_diag") = 0.25, py::arg("seed") = 0,
        py::arg("loss") = "squared", py::arg("huber_gamma") = 0.25, py::arg("lam") = 0.1,
        py::arg("k") = 1, py::arg("binarize") = false, py::arg("normalize") = false);

  m.def("load_libsvm_problem", &make_from_libsvm, py::arg("path"), py::arg("loss") = "squared",
        py::arg("huber_gamma") = 0.25, py::arg("lam") = 0.1, py::arg("k") = 1,
        py::arg("dim") = -1, py::arg("binarize") = false, py::arg("normalize") = false);

  m.def(
      "hard_threshold",
      [](const std::vector<double>& x, sd::Index k) {
        return sd::hard_threshold_k(sd::DenseVector(x), k).values();
      },
      py::arg("x"), py::arg("k"));

  m.def(
      "top_k_indices",
      [](const std::vector<double>& x, sd::Index k) {
        return sd::top_k_indices(sd::DenseVector(x), k).indices();
      },
      py::arg("x"), py::arg("k"));

  m.def(
      "estimation_error",
      [](const std::vector<double>& w, const std::vector<double>& true_w) {
        return sd::estimation_error(sd::DenseVector(w), sd::DenseVector(true_w));
      },
      py::arg("w"), py::arg("true_w"));

  m.def(
      "support_recovered",
      [](const std::vector<double>& w, const std::vector<double>& true_w) {
        return sd::support_recovery_success(sd::DenseVector(w), sd::DenseVector(true_w));
      },
      py::arg("w"), py::arg("true_w"));
}
