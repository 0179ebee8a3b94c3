#include "bgev/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace bgev {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
// Accept a stalled line search as convergence when the gradient is this small
// relative to max(1, |f|); below it the differenced gradient is mostly noise.
constexpr double kStallGradTol = 1e-6;
// Steps that lower f by less than this fraction of |f| make no measurable progress.
constexpr double kNoProgress = 1e-15;
constexpr int kMaxNoProgressSteps = 5;

double step_for(double xi, double rel) { return rel * std::max(1.0, std::abs(xi)); }

}  // namespace

const char* to_string(OptimStatus status) {
  switch (status) {
    case OptimStatus::converged: return "converged";
    case OptimStatus::max_iterations: return "max_iterations";
    case OptimStatus::line_search_failed: return "line_search_failed";
    case OptimStatus::non_finite_start: return "non_finite_start";
  }
  return "unknown";
}

std::optional<Eigen::VectorXd> numeric_gradient(const Objective& f, const Eigen::VectorXd& x,
                                                double fx, double rel_step, int* evals) {
  const auto n = x.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = step_for(x[i], rel_step);
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (evals) *evals += 2;
    const bool ok_p = std::isfinite(fp);
    const bool ok_m = std::isfinite(fm);
    if (ok_p && ok_m) {
      g[i] = (fp - fm) / (2.0 * h);
    } else if (ok_p) {
      g[i] = (fp - fx) / h;
    } else if (ok_m) {
      g[i] = (fx - fm) / h;
    } else {
      return std::nullopt;
    }
  }
  return g;
}

std::optional<Eigen::MatrixXd> numeric_hessian(const Objective& f, const Eigen::VectorXd& x,
                                               double rel_step) {
  const auto n = x.size();
  Eigen::MatrixXd hess(n, n);
  const double f0 = f(x);
  if (!std::isfinite(f0)) return std::nullopt;
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = step_for(x[i], rel_step);

  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = x[i] + h[i];
    const double fp = f(p);
    p[i] = x[i] - h[i];
    const double fm = f(p);
    p[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) return std::nullopt;
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      double corner[4];
      const double si[4] = {1, 1, -1, -1};
      const double sj[4] = {1, -1, 1, -1};
      for (int k = 0; k < 4; ++k) {
        p[i] = x[i] + si[k] * h[i];
        p[j] = x[j] + sj[k] * h[j];
        corner[k] = f(p);
        if (!std::isfinite(corner[k])) return std::nullopt;
      }
      p[i] = x[i];
      p[j] = x[j];
      const double v = (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& start,
                          const OptimOptions& opts) {
  OptimResult res;
  res.x = start;
  const auto n = start.size();
  double fx = f(res.x);
  res.evaluations = 1;
  res.value = fx;
  if (!std::isfinite(fx)) {
    res.status = OptimStatus::non_finite_start;
    return res;
  }

  auto grad = numeric_gradient(f, res.x, fx, opts.fd_step, &res.evaluations);
  if (!grad) {
    res.status = OptimStatus::line_search_failed;
    return res;
  }
  Eigen::VectorXd g = *grad;
  Eigen::MatrixXd inv_hess = Eigen::MatrixXd::Identity(n, n);
  bool first_step = true;
  int stalled_steps = 0;

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.grad_tol * std::max(1.0, std::abs(fx))) {
      res.status = OptimStatus::converged;
      res.value = fx;
      return res;
    }

    Eigen::VectorXd dir = -inv_hess * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      inv_hess.setIdentity();
      first_step = true;
      dir = -g;
      slope = -g.squaredNorm();
    }
    double alpha = first_step ? std::min(1.0, 1.0 / gnorm) : 1.0;

    Eigen::VectorXd trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial = res.x + alpha * dir;
      f_trial = f(trial);
      ++res.evaluations;
      if (std::isfinite(f_trial) && f_trial <= fx + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      double next = 0.5 * alpha;
      if (std::isfinite(f_trial)) {
        // Minimiser of the quadratic through f(0), f'(0) and f(alpha).
        const double denom = 2.0 * (f_trial - fx - slope * alpha);
        if (denom > 0.0) next = std::clamp(-slope * alpha * alpha / denom, 0.1 * alpha, 0.5 * alpha);
      }
      alpha = next;
    }
    stalled_steps = accepted && fx - f_trial <= kNoProgress * std::max(1.0, std::abs(fx)) ? stalled_steps + 1 : 0;
    if (!accepted || stalled_steps >= kMaxNoProgressSteps) {
      if (accepted && f_trial <= fx) {
        res.x = trial;
        fx = f_trial;
      }
      res.value = fx;
      res.status = gnorm <= kStallGradTol * std::max(1.0, std::abs(fx))
                       ? OptimStatus::converged
                       : OptimStatus::line_search_failed;
      return res;
    }

    auto g_new = numeric_gradient(f, trial, f_trial, opts.fd_step, &res.evaluations);
    if (!g_new) {
      res.x = trial;
      res.value = f_trial;
      res.status = OptimStatus::line_search_failed;
      return res;
    }
    const Eigen::VectorXd s = trial - res.x;
    const Eigen::VectorXd y = *g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_step) {
        inv_hess = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
        first_step = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
      inv_hess = (ident - rho * s * y.transpose()) * inv_hess * (ident - rho * y * s.transpose()) +
                 rho * s * s.transpose();
    }
    res.x = trial;
    fx = f_trial;
    g = *g_new;
  }
  res.value = fx;
  res.status = OptimStatus::max_iterations;
  return res;
}

}  // namespace bgev
