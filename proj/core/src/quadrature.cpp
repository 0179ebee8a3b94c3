#include "bgev/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "bgev/errors.hpp"

namespace bgev {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights pair with Kronrod nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lower;
  double upper;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double lower, double upper, int& evals) {
  const double centre = 0.5 * (lower + upper);
  const double half = 0.5 * (upper - lower);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  evals += 15;
  kronrod *= half;
  gauss *= half;
  double err = std::abs(kronrod - gauss);
  if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
  return {lower, upper, kronrod, err};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double lower, double upper,
                           const QuadratureOptions& opts) {
  detail::require_domain(std::isfinite(lower) && std::isfinite(upper),
                         "integrate: bounds must be finite");
  QuadratureResult out;
  if (lower == upper) {
    out.converged = true;
    return out;
  }
  double sign = 1.0;
  if (upper < lower) {
    std::swap(lower, upper);
    sign = -1.0;
  }

  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, lower, upper, out.evaluations);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };

  int intervals = 1;
  while (total_err > tolerance() && intervals < opts.max_intervals) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.lower + worst.upper);
    if (mid <= worst.lower || mid >= worst.upper) break;  // cannot split further
    heap.pop();
    Segment left = gauss_kronrod(f, worst.lower, mid, out.evaluations);
    Segment right = gauss_kronrod(f, mid, worst.upper, out.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (intervals % 64 == 0) {
      // Re-sum to stop drift from the running updates.
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  out.value = sign * total;
  out.error = total_err;
  out.converged = total_err <= tolerance();
  return out;
}

QuadratureResult integrate_to_infinity(const Integrand& f, double lower,
                                       const QuadratureOptions& opts) {
  auto mapped = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double x = lower + (1.0 - s) / s;
    const double v = f(x) / (s * s);
    // 0 * inf in far tails, where the true integrand has underflowed.
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

QuadratureResult integrate_from_minus_infinity(const Integrand& f, double upper,
                                               const QuadratureOptions& opts) {
  auto mirrored = [&](double x) { return f(-x); };
  return integrate_to_infinity(mirrored, -upper, opts);
}

}  // namespace bgev
