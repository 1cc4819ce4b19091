#pragma once

#include <string>

#include "sparsedual/types.hpp"

namespace sparsedual {

enum class LossKind { squared, huber, hinge };

// Closed interval of dual-feasible alpha values; +-inf admitted.
struct FeasibleInterval {
  double lo;
  double hi;
  bool contains(double a) const { return a >= lo && a <= hi; }
};

// Per-sample loss: value, derivative, convex conjugate, conjugate derivative,
// dual feasible interval, and the smoothness modulus mu (loss is 1/mu-smooth;
// mu = 0 marks the nonsmooth hinge).
class LossModel {
 public:
  static LossModel squared();
  static LossModel huber(double gamma = 0.25);
  static LossModel hinge();
  static LossModel from_id(const std::string& id, double gamma = 0.25);

  LossKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double mu() const;
  bool classification() const { return kind_ != LossKind::squared; }
  std::string id() const;

  double value(double u, double y) const;
  double derivative(double u, double y) const;

  // Conjugate value; +inf outside the feasible interval (never throws).
  double conjugate(double alpha, double y) const;

  // Derivative of the conjugate; throws std::domain_error off the closed
  // feasible interval. On the hinge boundary the constant selection y is used.
  double conjugate_derivative(double alpha, double y) const;

  FeasibleInterval feasible_interval(double y) const;

  // Euclidean projection onto the feasible interval (clamp).
  double project(double alpha, double y) const;

 private:
  LossModel(LossKind kind, double gamma) : kind_(kind), gamma_(gamma) {}
  double check_label(double y) const;

  LossKind kind_;
  double gamma_;
};

}  // namespace sparsedual
