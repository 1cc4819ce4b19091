#include "sparsedual/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsedual {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LossModel LossModel::squared() { return LossModel(LossKind::squared, 0.0); }

LossModel LossModel::huber(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("huber: gamma must be positive and finite");
  }
  return LossModel(LossKind::huber, gamma);
}

LossModel LossModel::hinge() { return LossModel(LossKind::hinge, 0.0); }

LossModel LossModel::from_id(const std::string& id, double gamma) {
  if (id == "squared") return squared();
  if (id == "huber") return huber(gamma);
  if (id == "hinge") return hinge();
  throw std::invalid_argument("unknown loss id \"" + id +
                              "\"; valid: squared, huber, hinge");
}

double LossModel::mu() const {
  switch (kind_) {
    case LossKind::squared: return 0.5;
    case LossKind::huber: return gamma_;
    case LossKind::hinge: return 0.0;
  }
  return 0.0;
}

std::string LossModel::id() const {
  switch (kind_) {
    case LossKind::squared: return "squared";
    case LossKind::huber: return "huber";
    case LossKind::hinge: return "hinge";
  }
  return "";
}

double LossModel::check_label(double y) const {
  if (classification() && y != 1.0 && y != -1.0) {
    throw std::invalid_argument("classification loss requires labels in {-1,+1}");
  }
  return y;
}

double LossModel::value(double u, double y) const {
  check_label(y);
  switch (kind_) {
    case LossKind::squared: {
      const double r = y - u;
      return r * r;
    }
    case LossKind::huber: {
      const double z = y * u;
      if (z >= 1.0) return 0.0;
      if (z < 1.0 - gamma_) return 1.0 - z - gamma_ / 2.0;
      const double r = 1.0 - z;
      return r * r / (2.0 * gamma_);
    }
    case LossKind::hinge:
      return std::max(0.0, 1.0 - y * u);
  }
  return 0.0;
}

double LossModel::derivative(double u, double y) const {
  check_label(y);
  switch (kind_) {
    case LossKind::squared:
      return 2.0 * (u - y);
    case LossKind::huber: {
      const double z = y * u;
      if (z >= 1.0) return 0.0;
      if (z < 1.0 - gamma_) return -y;
      return -y * (1.0 - z) / gamma_;
    }
    case LossKind::hinge: {
      const double z = y * u;
      if (z > 1.0) return 0.0;
      if (z < 1.0) return -y;
      return 0.0;  // deterministic selection at the kink
    }
  }
  return 0.0;
}

double LossModel::conjugate(double alpha, double y) const {
  check_label(y);
  switch (kind_) {
    case LossKind::squared:
      return alpha * alpha / 4.0 + y * alpha;
    case LossKind::huber: {
      const double z = y * alpha;
      if (z < -1.0 || z > 0.0) return kInf;
      return y * alpha + gamma_ / 2.0 * alpha * alpha;
    }
    case LossKind::hinge: {
      const double z = y * alpha;
      if (z < -1.0 || z > 0.0) return kInf;
      return y * alpha;
    }
  }
  return 0.0;
}

double LossModel::conjugate_derivative(double alpha, double y) const {
  check_label(y);
  if (!feasible_interval(y).contains(alpha)) {
    throw std::domain_error("conjugate_derivative: alpha outside feasible interval");
  }
  switch (kind_) {
    case LossKind::squared:
      return alpha / 2.0 + y;
    case LossKind::huber:
      return y + gamma_ * alpha;
    case LossKind::hinge:
      return y;
  }
  return 0.0;
}

FeasibleInterval LossModel::feasible_interval(double y) const {
  check_label(y);
  if (kind_ == LossKind::squared) return {-kInf, kInf};
  // {alpha : y*alpha in [-1, 0]}
  if (y > 0.0) return {-1.0, 0.0};
  return {0.0, 1.0};
}

double LossModel::project(double alpha, double y) const {
  const FeasibleInterval f = feasible_interval(y);
  return std::min(std::max(alpha, f.lo), f.hi);
}

}  // namespace sparsedual
