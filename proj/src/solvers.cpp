#include "sparsedual/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsedual/format.hpp"
#include "sparsedual/rng.hpp"
#include "sparsedual/vecops.hpp"

namespace sparsedual {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDivergenceGuard = 1e12;

std::uint64_t support_hash_of(const IndexSet& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (Index j : s) {
    std::uint64_t u = static_cast<std::uint64_t>(j);
    for (int b = 0; b < 8; ++b) {
      h ^= (u >> (8 * b)) & 0xffull;
      h *= 1099511628211ull;
    }
  }
  return h;
}

void fill_margins(const ProblemInstance& inst, const DenseVector& w, std::vector<double>& out) {
  for (Index i = 0; i < inst.n(); ++i) {
    out[static_cast<std::size_t>(i)] = dot(w, inst.sample(i));
  }
}

double primal_from_margins(const ProblemInstance& inst, const std::vector<double>& margins,
                           double w_sqnorm) {
  double s = 0.0;
  for (Index i = 0; i < inst.n(); ++i) {
    s += inst.loss().value(margins[static_cast<std::size_t>(i)], inst.label(i));
  }
  return s / static_cast<double>(inst.n()) + inst.lambda() / 2.0 * w_sqnorm;
}

// Mean conjugate value; alpha kept feasible by projection, so always finite.
double conjugate_mean(const ProblemInstance& inst, const std::vector<double>& alpha) {
  double s = 0.0;
  for (Index i = 0; i < inst.n(); ++i) {
    s += inst.loss().conjugate(alpha[static_cast<std::size_t>(i)], inst.label(i));
  }
  return s / static_cast<double>(inst.n());
}

double alpha_distance(const std::vector<double>& alpha, const std::vector<double>& ref) {
  double s = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double d = alpha[i] - ref[i];
    s += d * d;
  }
  return std::sqrt(s);
}

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Restriction of the objective to a fixed support; a is the n x |F| slice of
// the data matrix over that support.
struct RestrictedProblem {
  const ProblemInstance* inst;
  Eigen::MatrixXd a;
  Eigen::VectorXd y;

  double primal(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd m = a * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) s += inst->loss().value(m(i), y(i));
    return s / static_cast<double>(inst->n()) +
           inst->lambda() / 2.0 * beta.squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const {
    const Eigen::VectorXd m = a * beta;
    Eigen::VectorXd dl(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) dl(i) = inst->loss().derivative(m(i), y(i));
    return a.transpose() * dl / static_cast<double>(inst->n()) + inst->lambda() * beta;
  }

  double sigma_max_sq() const {
    const Eigen::MatrixXd b = a.transpose() * a;
    if (b.rows() == 0) return 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(b.rows());
    v.normalize();
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd next = b * v;
      const double norm = next.norm();
      if (norm == 0.0) return 0.0;
      v = next / norm;
    }
    return v.dot(b * v);
  }

  Eigen::VectorXd minimize(double grad_tol, Index cap) const {
    const auto& loss = inst->loss();
    const double lambda = inst->lambda();
    const double n = static_cast<double>(inst->n());
    const Eigen::Index f = a.cols();

    if (loss.kind() == LossKind::squared && f <= 200) {
      Eigen::MatrixXd m = (2.0 / n) * (a.transpose() * a);
      m.diagonal().array() += lambda;
      return m.ldlt().solve((2.0 / n) * (a.transpose() * y));
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(f);
    if (loss.kind() == LossKind::hinge) {
      // lambda-strongly-convex subgradient method, best iterate kept.
      Eigen::VectorXd best = beta;
      double best_p = primal(beta);
      for (Index s = 0; s < cap; ++s) {
        const Eigen::VectorXd g = gradient(beta);
        if (g.norm() <= grad_tol) break;
        beta -= g / (lambda * static_cast<double>(s + 1));
        const double p = primal(beta);
        if (p < best_p) {
          best_p = p;
          best = beta;
        }
      }
      return best;
    }

    const double curvature = loss.kind() == LossKind::squared ? 2.0 : 1.0 / loss.gamma();
    const double lip = curvature * sigma_max_sq() / n + lambda;
    for (Index s = 0; s < cap; ++s) {
      const Eigen::VectorXd g = gradient(beta);
      if (g.norm() <= grad_tol) break;
      beta -= g / lip;
    }
    return beta;
  }
};

RestrictedProblem make_restricted(const ProblemInstance& inst, const std::vector<Index>& f) {
  RestrictedProblem rp;
  rp.inst = &inst;
  rp.a = Eigen::MatrixXd::Zero(inst.n(), static_cast<Eigen::Index>(f.size()));
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(inst.dim()), -1);
  for (std::size_t r = 0; r < f.size(); ++r) pos[static_cast<std::size_t>(f[r])] = static_cast<Eigen::Index>(r);
  for (Index i = 0; i < inst.n(); ++i) {
    const SparseSample& s = inst.sample(i);
    const auto& idx = s.indices().indices();
    const auto& val = s.values();
    for (std::size_t p = 0; p < val.size(); ++p) {
      const Eigen::Index r = pos[static_cast<std::size_t>(idx[p])];
      if (r >= 0) rp.a(i, r) = val[p];
    }
  }
  rp.y = Eigen::VectorXd(inst.n());
  for (Index i = 0; i < inst.n(); ++i) rp.y(i) = inst.label(i);
  return rp;
}

DenseVector scatter(Index dim, const std::vector<Index>& f, const Eigen::VectorXd& beta) {
  DenseVector w(dim);
  for (std::size_t r = 0; r < f.size(); ++r) w[f[r]] = beta(static_cast<Eigen::Index>(r));
  return w;
}

[[noreturn]] void abort_diverged(const std::string& solver_id, Index t, double primal) {
  throw SolverAbort(solver_id + ": primal diverged at iteration " + std::to_string(t) +
                        " (value " + format_double(primal) + ")",
                    t, primal);
}

RunReport run_dual_core(const ProblemInstance& inst, const SolverConfig& config,
                        const BlockPartition& partition, const std::vector<double>* alpha_ref,
                        const std::string& solver_id) {
  config.validate(inst, true);
  partition.validate(inst.n());
  if (partition.block_count() != config.blocks) {
    throw std::invalid_argument(solver_id + ": partition size disagrees with config.blocks");
  }
  if (alpha_ref && static_cast<Index>(alpha_ref->size()) != inst.n()) {
    throw std::invalid_argument(solver_id + ": alpha_ref length mismatch");
  }

  const Index n = inst.n();
  const double dn = static_cast<double>(n);
  RunReport rep;
  rep.solver_id = solver_id;
  rep.config = config;

  DualState ds(inst);
  ds.set_resync_every(config.resync_every);
  DenseVector w(inst.dim());
  std::vector<double> margins(static_cast<std::size_t>(n), 0.0);
  Rng rng(config.seed);
  const bool single_block = partition.block_count() == 1;

  WallTimer timer;
  double w_sqnorm = 0.0;
  double p_cur = primal_from_margins(inst, margins, w_sqnorm);
  double d_cur = -conjugate_mean(inst, ds.alpha()) - inst.lambda() / 2.0 * w_sqnorm;
  double gap = p_cur - d_cur;

  Index last_recorded = -1;
  auto record = [&](Index t) {
    if (t == last_recorded) return;
    TraceRow row;
    row.t = t;
    row.seconds = timer.seconds();
    row.primal = p_cur;
    row.dual = d_cur;
    row.gap = gap;
    const IndexSet sup = support(w);
    row.nnz = sup.size();
    row.support_hash = support_hash_of(sup);
    row.alpha_ref_dist = alpha_ref ? alpha_distance(ds.alpha(), *alpha_ref) : kNaN;
    rep.rows.push_back(row);
    last_recorded = t;
  };

  record(0);
  std::string stop_reason;
  Index t_final = 0;
  if (config.stop_gap_tol > 0.0 && gap <= config.stop_gap_tol) {
    stop_reason = "gap_tol";
  } else if (config.target_primal && p_cur <= *config.target_primal) {
    stop_reason = "target_primal";
  }

  if (stop_reason.empty()) {
    for (Index t = 1; t <= config.max_iters; ++t) {
      const double eta = step_size(t - 1, config, inst);
      const Index b = single_block
                          ? 0
                          : static_cast<Index>(rng.next_below(
                                static_cast<std::uint64_t>(partition.block_count())));
      for (Index i : partition.blocks[static_cast<std::size_t>(b)]) {
        const double y = inst.label(i);
        const double a = ds.alpha(i);
        const double g = (margins[static_cast<std::size_t>(i)] -
                          inst.loss().conjugate_derivative(a, y)) /
                         dn;
        ds.update_coordinate(i, inst.loss().project(a + eta * g, y));
      }
      w = hard_threshold_k(ds.accumulator(), inst.k());
      w_sqnorm = squared_norm(w);
      fill_margins(inst, w, margins);
      const double p_prev = p_cur;
      p_cur = primal_from_margins(inst, margins, w_sqnorm);
      if (!std::isfinite(p_cur) || p_cur > kDivergenceGuard) abort_diverged(solver_id, t, p_cur);
      d_cur = -conjugate_mean(inst, ds.alpha()) - inst.lambda() / 2.0 * w_sqnorm;
      gap = p_cur - d_cur;
      t_final = t;

      if (config.stop_gap_tol > 0.0 && gap <= config.stop_gap_tol) {
        stop_reason = "gap_tol";
      } else if (config.stop_rel_primal_tol > 0.0 &&
                 std::fabs(p_cur - p_prev) <= config.stop_rel_primal_tol * std::fabs(p_cur)) {
        stop_reason = "rel_primal";
      } else if (config.target_primal && p_cur <= *config.target_primal) {
        stop_reason = "target_primal";
      }
      if (!stop_reason.empty() || t == config.max_iters || t % config.record_every == 0) {
        record(t);
      }
      if (!stop_reason.empty()) break;
    }
  }

  rep.stop_reason = stop_reason.empty() ? "max_iters" : stop_reason;
  rep.iterations = t_final;
  rep.final_w = w;
  rep.final_alpha = ds.alpha();
  rep.final_support = support(w);
  rep.final_primal = p_cur;
  rep.final_dual = d_cur;
  rep.final_gap = gap;
  return rep;
}

RunReport run_primal_core(const ProblemInstance& inst, const SolverConfig& config,
                          bool debias, const std::string& solver_id) {
  config.validate(inst, false);

  const Index n = inst.n();
  RunReport rep;
  rep.solver_id = solver_id;
  rep.config = config;

  DenseVector w(inst.dim());
  std::vector<double> margins(static_cast<std::size_t>(n), 0.0);
  WallTimer timer;
  double p_cur = primal_from_margins(inst, margins, 0.0);

  Index last_recorded = -1;
  double prev_recorded_primal = kNaN;
  Index up_streak = 0;
  auto record = [&](Index t) {
    if (t == last_recorded) return;
    TraceRow row;
    row.t = t;
    row.seconds = timer.seconds();
    row.primal = p_cur;
    row.dual = kNaN;
    row.gap = kNaN;
    const IndexSet sup = support(w);
    row.nnz = sup.size();
    row.support_hash = support_hash_of(sup);
    row.alpha_ref_dist = kNaN;
    rep.rows.push_back(row);
    last_recorded = t;
    if (!std::isnan(prev_recorded_primal)) {
      up_streak = p_cur > prev_recorded_primal ? up_streak + 1 : 0;
      if (up_streak >= 50) rep.diverged_flag = true;
    }
    prev_recorded_primal = p_cur;
  };

  record(0);
  std::string stop_reason;
  Index t_final = 0;
  if (config.target_primal && p_cur <= *config.target_primal) stop_reason = "target_primal";

  if (stop_reason.empty()) {
    for (Index t = 1; t <= config.max_iters; ++t) {
      const double eta = step_size(t - 1, config, inst);
      const DenseVector grad = primal_subgradient(inst, w);
      DenseVector v(inst.dim());
      for (Index j = 0; j < inst.dim(); ++j) v[j] = w[j] - eta * grad[j];
      if (!debias) {
        w = hard_threshold_k(v, inst.k());
      } else {
        const IndexSet f = top_k_indices(v, inst.k());
        const RestrictedProblem rp = make_restricted(inst, f.indices());
        const Index cap = inst.loss().kind() == LossKind::hinge ? 1000 : 100000;
        w = scatter(inst.dim(), f.indices(), rp.minimize(1e-8, cap));
      }
      fill_margins(inst, w, margins);
      const double p_prev = p_cur;
      p_cur = primal_from_margins(inst, margins, squared_norm(w));
      if (!std::isfinite(p_cur) || p_cur > kDivergenceGuard) abort_diverged(solver_id, t, p_cur);
      t_final = t;

      if (config.stop_rel_primal_tol > 0.0 &&
          std::fabs(p_cur - p_prev) <= config.stop_rel_primal_tol * std::fabs(p_cur)) {
        stop_reason = "rel_primal";
      } else if (config.target_primal && p_cur <= *config.target_primal) {
        stop_reason = "target_primal";
      }
      if (!stop_reason.empty() || t == config.max_iters || t % config.record_every == 0) {
        record(t);
      }
      if (!stop_reason.empty()) break;
    }
  }

  rep.stop_reason = stop_reason.empty() ? "max_iters" : stop_reason;
  rep.iterations = t_final;
  rep.final_w = w;
  rep.final_support = support(w);
  rep.final_primal = p_cur;
  rep.final_dual = kNaN;
  rep.final_gap = kNaN;
  return rep;
}

}  // namespace

StepSchedule step_schedule_from_id(const std::string& id) {
  if (id == "theorem_mu") return StepSchedule::theorem_mu;
  if (id == "constant") return StepSchedule::constant;
  if (id == "inv_t") return StepSchedule::inv_t;
  throw std::invalid_argument("unknown step schedule '" + id +
                              "' (valid: theorem_mu, constant, inv_t)");
}

std::string step_schedule_id(StepSchedule schedule) {
  switch (schedule) {
    case StepSchedule::theorem_mu: return "theorem_mu";
    case StepSchedule::constant: return "constant";
    case StepSchedule::inv_t: return "inv_t";
  }
  throw std::logic_error("unreachable");
}

void SolverConfig::validate(const ProblemInstance& inst, bool dual_method) const {
  if (max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be >= 0");
  if (!(eta0 >= 0.0) || !std::isfinite(eta0)) {
    throw std::invalid_argument("SolverConfig: eta0 must be finite and >= 0");
  }
  if (!(stop_gap_tol >= 0.0) || !(stop_rel_primal_tol >= 0.0)) {
    throw std::invalid_argument("SolverConfig: stopping tolerances must be >= 0");
  }
  if (record_every < 1) throw std::invalid_argument("SolverConfig: record_every must be >= 1");
  if (resync_every < 1) throw std::invalid_argument("SolverConfig: resync_every must be >= 1");
  if (blocks < 1 || blocks > inst.n()) {
    throw std::invalid_argument("SolverConfig: blocks outside [1, n]");
  }
  if (target_primal && !std::isfinite(*target_primal)) {
    throw std::invalid_argument("SolverConfig: target_primal must be finite");
  }
  if (schedule == StepSchedule::theorem_mu) {
    if (!dual_method) {
      throw std::invalid_argument(
          "SolverConfig: theorem_mu applies to dual solvers only; use constant or inv_t");
    }
    if (inst.loss().mu() == 0.0) {
      throw std::invalid_argument(
          "SolverConfig: theorem_mu needs a smooth loss (hinge has mu = 0); use constant or "
          "inv_t");
    }
  }
}

nlohmann::json SolverConfig::to_json() const {
  nlohmann::json j{{"max_iters", max_iters},
                   {"step_schedule", step_schedule_id(schedule)},
                   {"eta0", eta0},
                   {"stop_gap_tol", stop_gap_tol},
                   {"stop_rel_primal_tol", stop_rel_primal_tol},
                   {"seed", seed},
                   {"blocks", blocks},
                   {"record_every", record_every},
                   {"resync_every", resync_every}};
  if (target_primal) {
    j["target_primal"] = *target_primal;
  } else {
    j["target_primal"] = nullptr;
  }
  return j;
}

void BlockPartition::validate(Index n) const {
  if (blocks.empty()) throw std::invalid_argument("BlockPartition: no blocks");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  Index covered = 0;
  for (const auto& block : blocks) {
    if (block.empty()) throw std::invalid_argument("BlockPartition: empty block");
    for (Index i : block) {
      if (i < 0 || i >= n) throw std::invalid_argument("BlockPartition: index out of range");
      if (seen[static_cast<std::size_t>(i)]) {
        throw std::invalid_argument("BlockPartition: duplicate index");
      }
      seen[static_cast<std::size_t>(i)] = true;
      ++covered;
    }
  }
  if (covered != n) throw std::invalid_argument("BlockPartition: blocks do not cover [0, n)");
}

BlockPartition make_partition(Index n, Index m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("make_partition: n must be >= 1");
  if (m < 1 || m > n) throw std::invalid_argument("make_partition: m outside [1, n]");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);

  BlockPartition part;
  part.blocks.resize(static_cast<std::size_t>(m));
  const Index base = n / m;
  const Index extra = n % m;
  std::size_t cursor = 0;
  for (Index b = 0; b < m; ++b) {
    const Index size = base + (b < extra ? 1 : 0);
    auto& block = part.blocks[static_cast<std::size_t>(b)];
    block.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                 order.begin() + static_cast<std::ptrdiff_t>(cursor + static_cast<std::size_t>(size)));
    std::sort(block.begin(), block.end());
    cursor += static_cast<std::size_t>(size);
  }
  return part;
}

std::string RunReport::to_csv() const {
  std::string out = "t,seconds,primal,dual,gap,nnz,support_hash\n";
  for (const TraceRow& r : rows) {
    out += format_index(r.t);
    out += ',';
    out += format_double(r.seconds);
    out += ',';
    out += format_double(r.primal);
    out += ',';
    out += format_double(r.dual);
    out += ',';
    out += format_double(r.gap);
    out += ',';
    out += format_index(r.nnz);
    out += ',';
    out += std::to_string(r.support_hash);
    out += '\n';
  }
  return out;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const TraceRow& r : rows) {
    rows_json.push_back({{"t", r.t},
                         {"seconds", r.seconds},
                         {"primal", r.primal},
                         {"dual", r.dual},
                         {"gap", r.gap},
                         {"nnz", r.nnz},
                         {"support_hash", r.support_hash},
                         {"alpha_ref_dist", r.alpha_ref_dist}});
  }
  return nlohmann::json{
      {"solver", solver_id},
      {"config", config.to_json()},
      {"stop_reason", stop_reason},
      {"diverged", diverged_flag},
      {"iterations", iterations},
      {"final",
       {{"primal", final_primal},
        {"dual", final_dual},
        {"gap", final_gap},
        {"nnz", final_support.size()},
        {"support", final_support.indices()}}},
      {"rows", rows_json},
      {"metadata", {{"block_sampling", "with-replacement"}}}};
}

RunReport diht(const ProblemInstance& inst, const SolverConfig& config,
               const std::vector<double>* alpha_ref) {
  if (config.blocks != 1) {
    throw std::invalid_argument("diht: config.blocks must be 1 (use sdiht for blocks)");
  }
  BlockPartition part;
  part.blocks.emplace_back(static_cast<std::size_t>(inst.n()));
  std::iota(part.blocks[0].begin(), part.blocks[0].end(), Index{0});
  return run_dual_core(inst, config, part, alpha_ref, "diht");
}

RunReport sdiht(const ProblemInstance& inst, const SolverConfig& config,
                const BlockPartition& partition, const std::vector<double>* alpha_ref) {
  return run_dual_core(inst, config, partition, alpha_ref, "sdiht");
}

RunReport iht_baseline(const ProblemInstance& inst, const SolverConfig& config) {
  return run_primal_core(inst, config, false, "iht");
}

RunReport htp_baseline(const ProblemInstance& inst, const SolverConfig& config) {
  return run_primal_core(inst, config, true, "htp");
}

OracleResult brute_force_oracle(const ProblemInstance& inst) {
  const Index d = inst.dim();
  const Index k = inst.k();
  double binom = 1.0;
  for (Index j = 1; j <= k; ++j) {
    binom *= static_cast<double>(d - j + 1) / static_cast<double>(j);
    if (binom > 1e5) {
      throw std::invalid_argument("brute_force_oracle: support enumeration budget exceeded");
    }
  }

  const Index cap = inst.loss().kind() == LossKind::hinge ? 5000 : 200000;
  OracleResult best;
  bool have_best = false;
  std::vector<Index> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), Index{0});
  while (true) {
    const RestrictedProblem rp = make_restricted(inst, comb);
    const Eigen::VectorXd beta = rp.minimize(1e-10, cap);
    const double p = rp.primal(beta);
    if (!have_best || p < best.primal) {
      best.primal = p;
      best.w = scatter(d, comb, beta);
      have_best = true;
    }
    Index pos = k - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == d - k + pos) --pos;
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j) {
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  best.support = support(best.w);
  return best;
}

double step_size(Index t, const SolverConfig& config, const ProblemInstance& inst) {
  if (t < 0) throw std::invalid_argument("step_size: t must be >= 0");
  switch (config.schedule) {
    case StepSchedule::theorem_mu: {
      const double mu = inst.loss().mu();
      if (mu == 0.0) {
        throw std::invalid_argument("step_size: theorem_mu needs mu > 0");
      }
      return static_cast<double>(config.blocks) * static_cast<double>(inst.n()) /
             (mu * static_cast<double>(t + 1));
    }
    case StepSchedule::constant:
      return config.eta0;
    case StepSchedule::inv_t:
      return config.eta0 / static_cast<double>(t + 1);
  }
  throw std::logic_error("unreachable");
}

RunReport run_solver(const ProblemInstance& inst, const std::string& solver_id,
                     const SolverConfig& config) {
  if (solver_id == "diht") return diht(inst, config);
  if (solver_id == "sdiht") {
    return sdiht(inst, config, make_partition(inst.n(), config.blocks, config.seed));
  }
  if (solver_id == "iht") return iht_baseline(inst, config);
  if (solver_id == "htp") return htp_baseline(inst, config);
  throw std::invalid_argument("unknown solver '" + solver_id +
                              "' (valid: diht, sdiht, iht, htp)");
}

SolverConfig resolve_auto_step(const ProblemInstance& inst, const SolverSetup& setup) {
  SolverConfig cfg = setup.config;
  if (cfg.schedule == StepSchedule::constant && cfg.eta0 == 0.0) {
    cfg.eta0 = (setup.solver_id == "diht" || setup.solver_id == "sdiht")
                   ? suggested_dual_step(inst)
                   : suggested_iht_step(inst);
  }
  return cfg;
}

RunReport run_setup(const ProblemInstance& inst, const SolverSetup& setup) {
  return run_solver(inst, setup.solver_id, resolve_auto_step(inst, setup));
}

double power_sigma_max(const ProblemInstance& inst, Index iters) {
  const Index d = inst.dim();
  DenseVector v(d);
  for (Index j = 0; j < d; ++j) v[j] = 1.0 / std::sqrt(static_cast<double>(d));
  double sigma_sq = 0.0;
  for (Index it = 0; it < iters; ++it) {
    DenseVector next(d);
    sigma_sq = 0.0;
    for (Index i = 0; i < inst.n(); ++i) {
      const SparseSample& s = inst.sample(i);
      const double proj = dot(v, s);
      sigma_sq += proj * proj;
      const auto& idx = s.indices().indices();
      const auto& val = s.values();
      for (std::size_t p = 0; p < val.size(); ++p) next[idx[p]] += proj * val[p];
    }
    const double norm = std::sqrt(squared_norm(next));
    if (norm == 0.0) return 0.0;
    for (Index j = 0; j < d; ++j) v[j] = next[j] / norm;
  }
  return std::sqrt(sigma_sq);
}

double suggested_dual_step(const ProblemInstance& inst) {
  const double n = static_cast<double>(inst.n());
  const double smax = power_sigma_max(inst);
  return inst.lambda() * n * n / (inst.lambda() * n * inst.loss().mu() + smax * smax);
}

double suggested_iht_step(const ProblemInstance& inst) {
  double curvature = 1.0;
  if (inst.loss().kind() == LossKind::squared) curvature = 2.0;
  if (inst.loss().kind() == LossKind::huber) curvature = 1.0 / inst.loss().gamma();
  const double smax = power_sigma_max(inst);
  const double lip = curvature * smax * smax / static_cast<double>(inst.n()) + inst.lambda();
  return 0.95 / lip;
}

}  // namespace sparsedual
