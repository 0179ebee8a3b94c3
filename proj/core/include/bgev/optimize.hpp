#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace bgev {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimOptions {
  int max_iterations = 500;
  /// Stop when max|grad| <= grad_tol * max(1, |f|).
  double grad_tol = 1e-8;
  /// Central-difference step, relative to max(1, |x_i|).
  double fd_step = 1e-6;
};

enum class OptimStatus {
  converged,
  max_iterations,
  line_search_failed,
  non_finite_start,
};

const char* to_string(OptimStatus status);

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  OptimStatus status = OptimStatus::converged;
  bool converged() const { return status == OptimStatus::converged; }
};

/// Minimises f by BFGS with numerically differenced gradients and a
/// backtracking Armijo line search. A non-finite f is a failed trial step;
/// if the start is non-finite the routine returns immediately.
OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& start,
                          const OptimOptions& opts = {});

/// Central-difference gradient, falling back to a one-sided difference where one
/// neighbour is non-finite. Empty when no finite difference exists.
std::optional<Eigen::VectorXd> numeric_gradient(const Objective& f, const Eigen::VectorXd& x,
                                                double fx, double rel_step, int* evals = nullptr);

/// Central-difference Hessian with step rel_step * max(1, |x_i|); empty if any
/// evaluation is non-finite.
std::optional<Eigen::MatrixXd> numeric_hessian(const Objective& f, const Eigen::VectorXd& x,
                                               double rel_step = 1e-4);

}  // namespace bgev
