#include "sparsedual/objective.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsedual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dual_dim(const ProblemInstance& inst, const std::vector<double>& alpha) {
  if (static_cast<Index>(alpha.size()) != inst.n()) {
    throw std::invalid_argument("dual vector length must equal sample count");
  }
}

void check_primal_dim(const ProblemInstance& inst, const DenseVector& w) {
  if (w.dim() != inst.dim()) {
    throw std::invalid_argument("weight vector dimension mismatch");
  }
}

// Sum of conjugate values; +inf when any coordinate is infeasible.
double conjugate_sum(const ProblemInstance& inst, const std::vector<double>& alpha) {
  double s = 0.0;
  for (Index i = 0; i < inst.n(); ++i) {
    const double c = inst.loss().conjugate(alpha[static_cast<std::size_t>(i)], inst.label(i));
    if (c == kInf) return kInf;
    s += c;
  }
  return s;
}

}  // namespace

ProblemInstance::ProblemInstance(Dataset data, LossModel loss, double lambda, Index k)
    : data_(std::move(data)), loss_(loss), lambda_(lambda), k_(k) {
  const Index n = static_cast<Index>(data_.samples.size());
  if (n < 1) throw std::invalid_argument("ProblemInstance: need at least one sample");
  if (static_cast<Index>(data_.labels.size()) != n) {
    throw std::invalid_argument("ProblemInstance: label/sample count mismatch");
  }
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("ProblemInstance: lambda must be positive and finite");
  }
  if (k_ < 1 || k_ > data_.dim) {
    throw std::invalid_argument("ProblemInstance: sparsity budget k outside [1, dim]");
  }
  for (const SparseSample& s : data_.samples) {
    if (s.max_index() >= data_.dim) {
      throw std::invalid_argument("ProblemInstance: sample index exceeds dimension");
    }
  }
  for (double& y : data_.labels) {
    if (!std::isfinite(y)) throw std::invalid_argument("ProblemInstance: non-finite label");
    if (loss_.classification()) {
      if (y == 0.0) y = -1.0;
      if (y != 1.0 && y != -1.0) {
        throw std::invalid_argument(
            "ProblemInstance: classification labels must lie in {-1, 0, +1}");
      }
    }
  }
}

DualState::DualState(const ProblemInstance& inst)
    : inst_(&inst),
      alpha_(static_cast<std::size_t>(inst.n()), 0.0),
      wtilde_(inst.dim()) {}

DualState::DualState(const ProblemInstance& inst, std::vector<double> alpha)
    : inst_(&inst), alpha_(std::move(alpha)), wtilde_(inst.dim()) {
  check_dual_dim(inst, alpha_);
  for (Index i = 0; i < inst.n(); ++i) {
    if (!inst.loss().feasible_interval(inst.label(i)).contains(alpha_[static_cast<std::size_t>(i)])) {
      throw std::domain_error("DualState: infeasible dual coordinate");
    }
  }
  resync();
}

void DualState::set_resync_every(Index updates) {
  if (updates < 1) throw std::invalid_argument("resync_every must be >= 1");
  resync_every_ = updates;
}

void DualState::update_coordinate(Index i, double value) {
  double& slot = alpha_[static_cast<std::size_t>(i)];
  const double delta = value - slot;
  slot = value;
  if (delta != 0.0) {
    const double coef = -delta / (inst_->lambda() * static_cast<double>(inst_->n()));
    const SparseSample& s = inst_->sample(i);
    const auto& idx = s.indices().indices();
    const auto& val = s.values();
    for (std::size_t p = 0; p < val.size(); ++p) {
      wtilde_[idx[p]] += coef * val[p];
    }
  }
  if (++updates_since_resync_ >= resync_every_) resync();
}

void DualState::resync() {
  for (Index j = 0; j < wtilde_.dim(); ++j) wtilde_[j] = 0.0;
  const double scale = inst_->lambda() * static_cast<double>(inst_->n());
  for (Index i = 0; i < inst_->n(); ++i) {
    const double a = alpha_[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    const double coef = -a / scale;
    const SparseSample& s = inst_->sample(i);
    const auto& idx = s.indices().indices();
    const auto& val = s.values();
    for (std::size_t p = 0; p < val.size(); ++p) {
      wtilde_[idx[p]] += coef * val[p];
    }
  }
  updates_since_resync_ = 0;
}

std::vector<double> compute_margins(const ProblemInstance& inst, const DenseVector& w) {
  check_primal_dim(inst, w);
  std::vector<double> margins(static_cast<std::size_t>(inst.n()));
  for (Index i = 0; i < inst.n(); ++i) {
    margins[static_cast<std::size_t>(i)] = dot(w, inst.sample(i));
  }
  return margins;
}

double primal_value(const ProblemInstance& inst, const DenseVector& w) {
  check_primal_dim(inst, w);
  double loss_sum = 0.0;
  for (Index i = 0; i < inst.n(); ++i) {
    loss_sum += inst.loss().value(dot(w, inst.sample(i)), inst.label(i));
  }
  return loss_sum / static_cast<double>(inst.n()) + inst.lambda() / 2.0 * squared_norm(w);
}

DenseVector primal_subgradient(const ProblemInstance& inst, const DenseVector& w) {
  check_primal_dim(inst, w);
  DenseVector g(inst.dim());
  const double inv_n = 1.0 / static_cast<double>(inst.n());
  for (Index i = 0; i < inst.n(); ++i) {
    const SparseSample& s = inst.sample(i);
    const double coef = inv_n * inst.loss().derivative(dot(w, s), inst.label(i));
    if (coef == 0.0) continue;
    const auto& idx = s.indices().indices();
    const auto& val = s.values();
    for (std::size_t p = 0; p < val.size(); ++p) g[idx[p]] += coef * val[p];
  }
  for (Index j = 0; j < inst.dim(); ++j) g[j] += inst.lambda() * w[j];
  return g;
}

PrimalState primal_from_dual(const ProblemInstance& inst, const std::vector<double>& alpha) {
  DualState ds(inst, alpha);
  return PrimalState(hard_threshold_k(ds.accumulator(), inst.k()));
}

double dual_value(const ProblemInstance& inst, const std::vector<double>& alpha) {
  check_dual_dim(inst, alpha);
  const double conj = conjugate_sum(inst, alpha);
  if (conj == kInf) throw std::domain_error("dual_value: infeasible alpha");
  const PrimalState w = primal_from_dual(inst, alpha);
  return -conj / static_cast<double>(inst.n()) - inst.lambda() / 2.0 * squared_norm(w.w);
}

std::vector<double> dual_supergradient(const ProblemInstance& inst,
                                       const std::vector<double>& alpha,
                                       const DenseVector& w) {
  check_dual_dim(inst, alpha);
  check_primal_dim(inst, w);
  std::vector<double> g(alpha.size());
  const double inv_n = 1.0 / static_cast<double>(inst.n());
  for (Index i = 0; i < inst.n(); ++i) {
    const double conj_d =
        inst.loss().conjugate_derivative(alpha[static_cast<std::size_t>(i)], inst.label(i));
    g[static_cast<std::size_t>(i)] = inv_n * (dot(w, inst.sample(i)) - conj_d);
  }
  return g;
}

double duality_gap(const ProblemInstance& inst, const DenseVector& w,
                   const std::vector<double>& alpha) {
  return primal_value(inst, w) - dual_value(inst, alpha);
}

double gap_closed_form(const ProblemInstance& inst, const DenseVector& w,
                       const std::vector<double>& alpha) {
  check_dual_dim(inst, alpha);
  check_primal_dim(inst, w);
  double s = 0.0;
  for (Index i = 0; i < inst.n(); ++i) {
    const double m = dot(w, inst.sample(i));
    const double a = alpha[static_cast<std::size_t>(i)];
    const double y = inst.label(i);
    s += inst.loss().value(m, y) + inst.loss().conjugate(a, y) - a * m;
  }
  return s / static_cast<double>(inst.n());
}

double margin_epsilon_bar(const ProblemInstance& inst, const DenseVector& w) {
  check_primal_dim(inst, w);
  const double wmin = min_abs_on_support(w);
  return wmin - inf_norm(primal_subgradient(inst, w)) / inst.lambda();
}

CertificateReport certify_saddle_point(const ProblemInstance& inst, const DenseVector& w,
                                       const std::vector<double>& alpha, double tol,
                                       bool scale_relative) {
  check_primal_dim(inst, w);
  check_dual_dim(inst, alpha);
  if (!(tol >= 0.0)) throw std::invalid_argument("certify_saddle_point: tol must be >= 0");

  const LossModel& loss = inst.loss();
  bool alpha_feasible = true;
  for (Index i = 0; i < inst.n(); ++i) {
    if (!loss.feasible_interval(inst.label(i)).contains(alpha[static_cast<std::size_t>(i)])) {
      alpha_feasible = false;
      break;
    }
  }

  CertificateReport rep;
  PrimalState from_dual;
  double eff = tol;
  if (alpha_feasible) {
    DualState ds(inst, alpha);
    if (scale_relative) eff = tol * std::max(1.0, inf_norm(ds.accumulator()));
    from_dual = PrimalState(hard_threshold_k(ds.accumulator(), inst.k()));
  }
  rep.tol = eff;

  // (b) alpha_i within the loss subdifferential at the margin.
  double b_res = 0.0;
  for (Index i = 0; i < inst.n(); ++i) {
    const double a = alpha[static_cast<std::size_t>(i)];
    const double y = inst.label(i);
    const double m = dot(w, inst.sample(i));
    double r;
    if (loss.kind() == LossKind::hinge) {
      const double z = y * m;
      if (z > 1.0 + eff) {
        r = std::fabs(a);
      } else if (z < 1.0 - eff) {
        r = std::fabs(a + y);
      } else {
        const double lo = std::min(0.0, -y);
        const double hi = std::max(0.0, -y);
        r = std::max({0.0, lo - a, a - hi});
      }
    } else {
      r = std::fabs(a - loss.derivative(m, y));
    }
    b_res = std::max(b_res, r);
  }
  rep.b_residual = b_res;
  rep.b_ok = b_res <= eff;

  // (c) w = H_k(wtilde(alpha)); an infeasible alpha has no accumulator.
  if (alpha_feasible) {
    double c2 = 0.0;
    for (Index j = 0; j < inst.dim(); ++j) {
      const double dlt = w[j] - from_dual.w[j];
      c2 += dlt * dlt;
    }
    rep.c_residual = std::sqrt(c2);
  } else {
    rep.c_residual = kInf;
  }
  rep.c_ok = rep.c_residual <= eff;

  // Support-stationarity reformulation of (c), evaluated with the canonical
  // subgradient selections; an empty support degenerates to ||P'||_inf <= lambda*tol.
  const DenseVector grad = primal_subgradient(inst, w);
  const IndexSet f = support(w);
  double sup_res = 0.0;
  for (Index j : f) sup_res = std::max(sup_res, std::fabs(grad[j]));
  rep.remark_support_residual = sup_res;
  const double grad_inf = inf_norm(grad);
  rep.remark_margin = (f.empty() ? 0.0 : min_abs_on_support(w)) - grad_inf / inst.lambda();
  rep.remark_ok = sup_res <= eff && rep.remark_margin >= -eff;

  const double conj = alpha_feasible ? conjugate_sum(inst, alpha) : kInf;
  if (conj == kInf) {
    rep.gap = kInf;
  } else {
    const double dual = -conj / static_cast<double>(inst.n()) -
                        inst.lambda() / 2.0 * squared_norm(from_dual.w);
    rep.gap = primal_value(inst, w) - dual;
  }
  rep.gap_ok = rep.gap <= eff;
  rep.optimal_certified = rep.b_ok && rep.c_ok && rep.remark_ok && rep.gap_ok;
  return rep;
}

nlohmann::json CertificateReport::to_json() const {
  return nlohmann::json{{"tol", tol},
                        {"b_ok", b_ok},
                        {"c_ok", c_ok},
                        {"remark_ok", remark_ok},
                        {"gap_ok", gap_ok},
                        {"optimal_certified", optimal_certified},
                        {"b_residual", b_residual},
                        {"c_residual", c_residual},
                        {"remark_support_residual", remark_support_residual},
                        {"remark_margin", remark_margin},
                        {"gap", gap}};
}

std::pair<double, double> restricted_singular_values(const ProblemInstance& inst, Index s) {
  const Index d = inst.dim();
  const Index n = inst.n();
  if (s < 1 || s > d) {
    throw std::invalid_argument("restricted_singular_values: s outside [1, dim]");
  }
  // Gate the actual enumeration size: sum_{j=1..s} C(d, j) <= 1e5.
  constexpr double kBudget = 1e5;
  double total = 0.0;
  double binom = 1.0;
  for (Index j = 1; j <= s; ++j) {
    binom *= static_cast<double>(d - j + 1) / static_cast<double>(j);
    total += binom;
    if (total > kBudget) {
      throw std::invalid_argument("restricted_singular_values: combinatorial budget exceeded");
    }
  }

  // Per-feature sparse rows of the d x N data matrix.
  std::vector<std::vector<std::pair<Index, double>>> feature_rows(static_cast<std::size_t>(d));
  for (Index i = 0; i < n; ++i) {
    const SparseSample& smp = inst.sample(i);
    const auto& idx = smp.indices().indices();
    const auto& val = smp.values();
    for (std::size_t p = 0; p < val.size(); ++p) {
      feature_rows[static_cast<std::size_t>(idx[p])].emplace_back(i, val[p]);
    }
  }

  double sig_max = 0.0;
  double sig_min = kInf;
  std::vector<Index> comb;
  for (Index size = 1; size <= s; ++size) {
    comb.assign(static_cast<std::size_t>(size), 0);
    for (Index j = 0; j < size; ++j) comb[static_cast<std::size_t>(j)] = j;
    while (true) {
      Eigen::MatrixXd xf = Eigen::MatrixXd::Zero(size, n);
      for (Index r = 0; r < size; ++r) {
        for (const auto& [col, v] : feature_rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(r)])]) {
          xf(r, col) = v;
        }
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(xf);
      const auto& sv = svd.singularValues();
      sig_max = std::max(sig_max, sv(0));
      sig_min = std::min(sig_min, sv(sv.size() - 1));
      // Next lexicographic combination.
      Index pos = size - 1;
      while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == d - size + pos) --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (Index j = pos + 1; j < size; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  return {sig_max, sig_min};
}

}  // namespace sparsedual
