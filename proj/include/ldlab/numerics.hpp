#ifndef LDLAB_NUMERICS_HPP
#define LDLAB_NUMERICS_HPP

// Special functions and scalar solvers shared by every other header.
// All logarithms are base 2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ldlab/errors.hpp"

namespace ldlab::numerics {

inline constexpr double kDefaultRootTol = 1e-12;
inline constexpr double kDefaultArgTol = 1e-10;
inline constexpr int kDefaultMaxIter = 200;
inline constexpr int kDefaultGridPoints = 256;

/// x * log2(y) with the convention 0 * log2(0) = 0.
inline double xlog2y(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log2(y);
}

/// x * log2(x) with 0 * log2(0) = 0.
inline double xlog2x(double x) { return xlog2y(x, x); }

/// h(a) = -a log2 a - (1-a) log2(1-a), with h(0) = h(1) = 0.
inline double binary_entropy(double a) {
  if (!(a >= 0.0 && a <= 1.0))
    throw DomainError("binary_entropy: argument " + std::to_string(a) + " outside [0,1]");
  return -xlog2x(a) - xlog2x(1.0 - a);
}

/// Binary Kullback-Leibler divergence K(a,b) in bits, for a, b in (0,1).
inline double kl_div(double a, double b) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0))
    throw DomainError("kl_div: arguments must lie in (0,1)");
  return a * std::log2(a / b) + (1.0 - a) * std::log2((1.0 - a) / (1.0 - b));
}

inline double positive_part(double x) { return x >= 0.0 ? x : 0.0; }

/// 1 - (1-a)^n for a in [0,1], accurate for small a.
inline double one_minus_pow_complement(double a, double n) {
  if (a >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-a));
}

struct RootOptions {
  double tol = kDefaultRootTol;
  int max_iter = kDefaultMaxIter;
};

struct BracketedRoot {
  double x = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Brent's method on a sign-changing bracket, followed by plain bisection
/// until |f(x)| <= tol or the bracket collapses to adjacent doubles.
template <class F>
BracketedRoot find_root(F&& f, double lo, double hi, RootOptions opts = {}) {
  if (!(opts.tol > 0.0)) throw DomainError("find_root: tolerance must be positive");
  if (!(lo <= hi)) throw DomainError("find_root: empty bracket");

  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw NumericError("find_root: non-finite function value at bracket end");
  if (fa == 0.0) return {a, 0, 0.0};
  if (fb == 0.0) return {b, 0, 0.0};
  if ((fa > 0.0) == (fb > 0.0))
    throw NoSignChange("find_root: f(lo) and f(hi) have the same sign");

  const double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * opts.tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol1 || fb == 0.0) break;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, m);
    fb = f(b);
    if (!std::isfinite(fb)) throw NumericError("find_root: non-finite function value");
  }
  if (iter >= opts.max_iter)
    throw NonConvergence("find_root: no convergence after " + std::to_string(opts.max_iter) +
                         " iterations");

  // Tighten the residual; b and c still bracket the root.
  double left = std::min(b, c), right = std::max(b, c);
  double fleft = (left == b) ? fb : fc;
  while (std::abs(fb) > opts.tol && fb != 0.0) {
    const double mid = 0.5 * (left + right);
    if (!(mid > left && mid < right)) break;
    const double fm = f(mid);
    if (!std::isfinite(fm)) throw NumericError("find_root: non-finite function value");
    if (++iter > 4 * opts.max_iter)
      throw NonConvergence("find_root: residual refinement did not converge");
    if ((fm > 0.0) == (fleft > 0.0)) {
      left = mid;
      fleft = fm;
    } else {
      right = mid;
    }
    if (std::abs(fm) < std::abs(fb)) {
      b = mid;
      fb = fm;
    }
  }
  return {b, iter, fb};
}

struct MaximizeOptions {
  double tol = kDefaultArgTol;
  int grid_points = kDefaultGridPoints;
};

struct MaximizerResult {
  double x_star = 0.0;
  double f_star = 0.0;
  int evaluations = 0;
};

/// Scans a uniform grid over [lo, hi], then refines around the best grid
/// point by golden-section search down to an interval of width opts.tol.
template <class F>
MaximizerResult maximize_scalar(F&& f, double lo, double hi, MaximizeOptions opts = {}) {
  if (!(lo < hi)) throw DomainError("maximize_scalar: need lo < hi");
  if (!(opts.tol > 0.0)) throw DomainError("maximize_scalar: tolerance must be positive");
  if (opts.grid_points < 3) throw DomainError("maximize_scalar: need at least 3 grid points");

  MaximizerResult best{lo, -std::numeric_limits<double>::infinity(), 0};
  auto eval = [&](double x) {
    const double v = f(x);
    ++best.evaluations;
    if (!std::isfinite(v))
      throw NumericError("maximize_scalar: non-finite value at x = " + std::to_string(x));
    if (v > best.f_star) {
      best.f_star = v;
      best.x_star = x;
    }
    return v;
  };

  const int n = opts.grid_points;
  const double step = (hi - lo) / (n - 1);
  int best_i = 0;
  double best_grid = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + i * step;
    const double v = eval(x);
    if (v > best_grid) {
      best_grid = v;
      best_i = i;
    }
  }

  double a = lo + std::max(best_i - 1, 0) * step;
  double b = best_i + 1 >= n - 1 ? hi : lo + (best_i + 1) * step;
  constexpr double kInvPhi = 0.6180339887498949; // 1/phi
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  while (b - a > opts.tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = eval(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = eval(x1);
    }
  }
  return best;
}

} // namespace ldlab::numerics

#endif // LDLAB_NUMERICS_HPP
