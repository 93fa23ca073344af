#pragma once

// One-dimensional quadrature used throughout the library:
//   * gauss_kronrod  - globally adaptive 10/21-point Gauss-Kronrod (QUADPACK-style error estimate)
//   * tanh_sinh      - double-exponential rule on a finite interval; tolerates endpoint singularities
//   * exp_sinh       - double-exponential rule on [a, inf)
//
// All routines take a callable double(double) and never evaluate it at the interval endpoints.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace polar::quad {

struct Tolerance {
  double abs = 0.0;
  double rel = 1e-10;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> kKronrodNodes = {
    0.00000000000000000e+00, 1.48874338981631211e-01, 2.94392862701460198e-01,
    4.33395394129247191e-01, 5.62757134668604683e-01, 6.79409568299024406e-01,
    7.80817726586416897e-01, 8.65063366688984511e-01, 9.30157491355708226e-01,
    9.73906528517171720e-01, 9.95657163025808081e-01,
};
inline constexpr std::array<double, 11> kKronrodWeights = {
    1.49445554002916906e-01, 1.47739104901338491e-01, 1.42775938577060081e-01,
    1.34709217311473326e-01, 1.23491976262065851e-01, 1.09387158802297642e-01,
    9.31254545836976055e-02, 7.50396748109199528e-02, 5.47558965743519960e-02,
    3.25581623079647275e-02, 1.16946388673718743e-02,
};
// Gauss nodes are the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 5> kGaussWeights = {
    2.95524224714752870e-01, 2.69266719309996355e-01, 2.19086362515982044e-01,
    1.49451349150580593e-01, 6.66713443086881376e-02,
};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> fv{};
  fv[0] = f(center);
  for (std::size_t i = 1; i < 11; ++i) {
    const double dx = half * kKronrodNodes[i];
    fv[2 * i - 1] = f(center - dx);
    fv[2 * i] = f(center + dx);
  }
  double kronrod = kKronrodWeights[0] * fv[0];
  double gauss = 0.0;
  double abs_sum = kKronrodWeights[0] * std::abs(fv[0]);
  for (std::size_t i = 1; i < 11; ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    kronrod += kKronrodWeights[i] * pair;
    abs_sum += kKronrodWeights[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < 11; ++i) {
    asc += kKronrodWeights[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  const double scale = std::abs(half);
  kronrod *= half;
  gauss *= half;
  abs_sum *= scale;
  asc *= scale;

  double err = std::abs(kronrod - gauss);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (abs_sum > tiny / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {a, b, kronrod, err};
}

inline double allowed(const Tolerance& tol, double value) {
  return std::max(tol.abs, tol.rel * std::abs(value));
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod: repeatedly bisects the segment with the largest error.
template <class F>
Estimate gauss_kronrod(F&& f, double a, double b, Tolerance tol = {}, int max_segments = 4000) {
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    Estimate r = gauss_kronrod(f, b, a, tol, max_segments);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gk21(f, a, b));
  double total = heap.top().value;
  double error = heap.top().error;
  int segments = 1;
  while (error > detail::allowed(tol, total) && segments < max_segments) {
    detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further in double precision
    heap.pop();
    detail::Segment left = detail::gk21(f, worst.a, mid);
    detail::Segment right = detail::gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  // Re-sum to shed accumulated rounding from the running updates.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, 21 * (2 * segments - 1), err <= detail::allowed(tol, value)};
}

/// Tanh-sinh rule on [a, b]. Abscissae cluster double-exponentially at both endpoints, so
/// integrable endpoint singularities are handled without special treatment.
template <class F>
Estimate tanh_sinh(F&& f, double a, double b, Tolerance tol = {}, int max_levels = 12) {
  if (a == b) return {0.0, 0.0, 0, true};
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTMax = 6.5;
  const double half = 0.5 * (b - a);
  int evaluations = 0;

  auto pair_term = [&](double t) {
    const double s = kHalfPi * std::sinh(t);
    const double e = std::exp(-2.0 * s);
    const double comp = 2.0 * e / (1.0 + e);  // 1 - x, computed without cancellation
    const double w = kHalfPi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    const double left = a + half * comp;
    const double right = b - half * comp;
    double sum = 0.0;
    if ((half > 0 && left > a && left < b) || (half < 0 && left < a && left > b)) {
      const double v = f(left);
      ++evaluations;
      if (std::isfinite(v)) sum += v;
    }
    if ((half > 0 && right < b && right > a) || (half < 0 && right > b && right < a)) {
      const double v = f(right);
      ++evaluations;
      if (std::isfinite(v)) sum += v;
    }
    return w * sum;
  };

  double h = 1.0;
  double sum = kHalfPi * f(0.5 * (a + b));
  ++evaluations;
  for (double t = h; t <= kTMax; t += h) sum += pair_term(t);
  double estimate = half * h * sum;
  double error = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    double added = 0.0;
    for (double t = h; t <= kTMax; t += 2.0 * h) added += pair_term(t);
    sum += added;
    const double next = half * h * sum;
    error = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && error <= detail::allowed(tol, estimate)) {
      return {estimate, error, evaluations, true};
    }
  }
  return {estimate, error, evaluations, false};
}

/// Exp-sinh rule on [a, inf): x = a + exp(pi/2 sinh t). Handles a singular left endpoint
/// and integrands decaying at least like a power law.
template <class F>
Estimate exp_sinh(F&& f, double a, Tolerance tol = {}, int max_levels = 12) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  constexpr double kTLow = -6.5;
  constexpr double kTHigh = 6.2;
  int evaluations = 0;
  auto term = [&](double t) {
    const double ex = std::exp(kHalfPi * std::sinh(t));
    const double x = a + ex;
    if (!(x > a) || !std::isfinite(x)) return 0.0;
    const double v = f(x);
    ++evaluations;
    const double r = v * kHalfPi * std::cosh(t) * ex;
    return std::isfinite(r) ? r : 0.0;
  };
  double h = 1.0;
  double sum = 0.0;
  for (double t = 0.0; t <= kTHigh; t += h) sum += term(t);
  for (double t = -h; t >= kTLow; t -= h) sum += term(t);
  double estimate = h * sum;
  double error = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    double added = 0.0;
    for (double t = h; t <= kTHigh; t += 2.0 * h) added += term(t);
    for (double t = -h; t >= kTLow; t -= 2.0 * h) added += term(t);
    sum += added;
    const double next = h * sum;
    error = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && error <= detail::allowed(tol, estimate)) {
      return {estimate, error, evaluations, true};
    }
  }
  return {estimate, error, evaluations, false};
}

}  // namespace polar::quad
