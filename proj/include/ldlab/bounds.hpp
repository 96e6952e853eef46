#ifndef LDLAB_BOUNDS_HPP
#define LDLAB_BOUNDS_HPP

// Random-coding bounds for almost disjunctive list-decoding s_L-codes built
// on the constant-weight ensemble: the union-size rate function A(s,Q,q),
// the capacity bound C(s), the rate bound and the error exponent.
//
// Parameter conventions used throughout:
//   s  strength (number of columns in the OR), s >= 1
//   L  list size, L >= 1
//   Q  relative column weight, 0 < Q < 1
//   q  relative size of the union of s columns, Q <= q <= min(1, sQ)
//   y  parameter of the curve q = Q (1 - y^s) / (1 - y), 0 < y < 1
//   R  code rate in bits per row

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ldlab/errors.hpp"
#include "ldlab/numerics.hpp"

namespace ldlab::bounds {

struct BoundOptions {
  numerics::RootOptions root{};
  numerics::MaximizeOptions maximize{};
  /// Search interval for maximization over Q.
  double q_lo = 1e-6;
  double q_hi = 1.0 - 1e-6;
};

/// (s, L, Q, R) with validation of their ranges.
struct CodeParams {
  int s = 1;
  int L = 1;
  double Q = 0.5;
  double R = 0.0;

  void validate() const {
    if (s < 1) throw DomainError("strength s must be >= 1");
    if (L < 1) throw DomainError("list size L must be >= 1");
    if (!(Q > 0.0 && Q < 1.0)) throw DomainError("relative weight Q must lie in (0,1)");
    if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("rate R must be finite and >= 0");
  }
};

/// A point (y, q) on the curve q = Q (1 - y^s)/(1 - y).
struct ParametricPoint {
  double y = 0.0;
  double q = 0.0;
};

struct BoundResult {
  double value = 0.0;
  std::optional<double> inner;    // y or q solution, when the bound has one
  std::optional<double> argmax_Q;
  int evaluations = 0;
  double residual = 0.0;
};

enum class Branch { Linear, Curved, Zero };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Linear: return "linear";
    case Branch::Curved: return "curved";
    case Branch::Zero: return "zero";
  }
  return "?";
}

namespace detail {

inline void check_sQ(int s, double Q) {
  if (s < 1) throw DomainError("strength s must be >= 1");
  if (!(Q > 0.0 && Q < 1.0)) throw DomainError("relative weight Q must lie in (0,1)");
}

inline void check_sLQ(int s, int L, double Q) {
  check_sQ(s, Q);
  if (L < 1) throw DomainError("list size L must be >= 1");
}

/// 1 + y + ... + y^(n-1); zero for n = 0.
inline double geometric_sum(double y, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc = acc * y + 1.0;
  return acc;
}

/// Largest admissible union fraction, min(1, sQ).
inline double q_upper(int s, double Q) { return std::min(1.0, s * Q); }

/// q h(Q/q), with the ratio clamped against rounding above 1.
inline double scaled_entropy(double Q, double q) {
  return q * numerics::binary_entropy(std::min(1.0, Q / q));
}

} // namespace detail

/// q(y) = Q (1 + y + ... + y^(s-1)).
inline double q_of_y(int s, double Q, double y) {
  detail::check_sQ(s, Q);
  if (!(y > 0.0 && y < 1.0)) throw DomainError("q_of_y: y must lie in (0,1)");
  return Q * detail::geometric_sum(y, s);
}

/// Inverse of q_of_y on (0,1).
inline ParametricPoint y_of_q(int s, double Q, double q, numerics::RootOptions opts = {}) {
  detail::check_sQ(s, Q);
  if (!(q > Q && q < detail::q_upper(s, Q)))
    throw DomainError("y_of_q: q must lie in (Q, min(1, sQ))");
  const auto root = numerics::find_root(
      [&](double y) { return Q * detail::geometric_sum(y, s) - q; }, 0.0, 1.0, opts);
  return {root.x, q};
}

/// Exponent A(s,Q,q) of the probability that s random weight-QN columns have
/// a union of size qN. At q = Q the limit (s-1) h(Q) is returned; the upper
/// end min(1, sQ) is evaluated at q - 1e-9.
inline double union_rate_function(int s, double Q, double q, numerics::RootOptions opts = {}) {
  detail::check_sQ(s, Q);
  const double upper = detail::q_upper(s, Q);
  if (!(q >= Q && q <= upper))
    throw DomainError("union_rate_function: q must lie in [Q, min(1, sQ)]");
  const double hQ = numerics::binary_entropy(Q);
  if (q == Q || s == 1) return (s - 1) * hQ;
  if (q > upper - 1e-9) q = upper - 1e-9;
  if (q <= Q) return (s - 1) * hQ;
  const double y = y_of_q(s, Q, q, opts).y;
  // Rearranged so that each logarithm multiplies a factor vanishing with it.
  return numerics::xlog2x(1.0 - q) + q * std::log2(Q) + s * (q - Q) * std::log2(y) +
         (s * Q - q) * std::log2(1.0 - y) + s * hQ;
}

/// C(s,Q) = h(Q) - q0 h(Q/q0) with q0 = 1 - (1-Q)^s.
inline double capacity_at_Q(int s, double Q) {
  detail::check_sQ(s, Q);
  const double q0 = numerics::one_minus_pow_complement(Q, s);
  return numerics::binary_entropy(Q) - detail::scaled_entropy(Q, q0);
}

/// Algebraically equivalent expanded form of capacity_at_Q, used for cross-checks.
inline double capacity_at_Q_expanded(int s, double Q) {
  detail::check_sQ(s, Q);
  const double p = std::pow(1.0 - Q, s);           // (1-Q)^s
  const double q0 = numerics::one_minus_pow_complement(Q, s);
  const double ratio = Q * std::pow(1.0 - Q, s - 1) / q0;
  return numerics::xlog2y(1.0 - Q - p, 1.0 - ratio) - Q * std::log2(q0) -
         p * std::log2(1.0 - Q);
}

/// Capacity lower bound: max over Q of C(s,Q).
inline BoundResult capacity(int s, const BoundOptions& opts = {}) {
  if (s < 1) throw DomainError("strength s must be >= 1");
  const auto m = numerics::maximize_scalar([s](double Q) { return capacity_at_Q(s, Q); },
                                           opts.q_lo, opts.q_hi, opts.maximize);
  BoundResult r;
  r.value = m.f_star;
  r.argmax_Q = m.x_star;
  r.evaluations = m.evaluations;
  return r;
}

/// Root y in [1-Q, 1) of y = 1 - Q + Q y^s [1 - ((y - y^s)/(1 - y^s))^L],
/// the stationary point of the list-decoding exponent. For s = 1 the
/// equation has no interior root and 1 - Q is returned.
inline numerics::BracketedRoot stationary_root(int s, int L, double Q,
                                               numerics::RootOptions opts = {}) {
  detail::check_sLQ(s, L, Q);
  if (s == 1) return {1.0 - Q, 0, 0.0};
  auto g = [&](double y) {
    // (y - y^s)/(1 - y^s) as a ratio of geometric sums, exact at y = 1.
    const double r = y * detail::geometric_sum(y, s - 1) / detail::geometric_sum(y, s);
    const double ys = std::pow(y, s), rL = std::pow(r, L);
    // Near y = 1 use y - (1-Q) - Q y^s = (1-y)(Q [1 + ... + y^{s-1}] - 1) so the
    // tiny r^L term is not swamped; near y = 0 the direct form is exact.
    if (y < 0.5) return (y - (1.0 - Q)) - Q * ys * (1.0 - rL);
    return (1.0 - y) * (Q * detail::geometric_sum(y, s) - 1.0) + Q * ys * rL;
  };
  return numerics::find_root(g, 1.0 - Q, 1.0, opts);
}

inline double stationary_y(int s, int L, double Q, numerics::RootOptions opts = {}) {
  return stationary_root(s, L, Q, opts).x;
}

namespace detail {

/// A_L(s,Q) given the stationary y.
inline double list_exponent_from_y(int s, int L, double Q, double y) {
  if (s == 1) return L * numerics::binary_entropy(Q);
  const double a = 1.0 - y;
  const double b = 1.0 / geometric_sum(y, s); // (1-y)/(1-y^s)
  return std::log2(Q / a) - s * numerics::kl_div(Q, a) - L * numerics::kl_div(Q, b);
}

} // namespace detail

/// A_L(s,Q): minimum over q of A(s,Q,q) + L [h(Q) - q h(Q/q)].
inline double list_exponent_at_Q(int s, int L, double Q, numerics::RootOptions opts = {}) {
  detail::check_sLQ(s, L, Q);
  return detail::list_exponent_from_y(s, L, Q, stationary_y(s, L, Q, opts));
}

/// Random-coding lower bound on the rate of LD s_L-codes,
/// max over Q of A_L(s,Q) / (s + L - 1).
inline BoundResult random_coding_rate(int s, int L, const BoundOptions& opts = {}) {
  detail::check_sLQ(s, L, 0.5);
  double worst_residual = 0.0;
  const auto m = numerics::maximize_scalar(
      [&](double Q) {
        const auto root = stationary_root(s, L, Q, opts.root);
        worst_residual = std::max(worst_residual, std::abs(root.residual));
        return detail::list_exponent_from_y(s, L, Q, root.x);
      },
      opts.q_lo, opts.q_hi, opts.maximize);
  BoundResult r;
  r.value = m.f_star / (s + L - 1);
  r.argmax_Q = m.x_star;
  r.inner = stationary_y(s, L, m.x_star, opts.root);
  r.evaluations = m.evaluations;
  r.residual = worst_residual;
  return r;
}

/// Limit of the random-coding rate bound as L grows:
/// log2((s-1)^(s-1) / s^s + 1), with 0^0 = 1.
inline double random_coding_rate_limit(int s) {
  if (s < 1) throw DomainError("strength s must be >= 1");
  if (s == 1) return 1.0;
  const double ln_term = (s - 1) * std::log(static_cast<double>(s - 1)) - s * std::log(static_cast<double>(s));
  return std::log2(std::exp(ln_term) + 1.0);
}

/// Minimizer (y2, q2) of A(s,Q,q) + L [h(Q) - q h(Q/q)]; q2 exceeds 1 - (1-Q)^s.
inline ParametricPoint list_minimizer(int s, int L, double Q, numerics::RootOptions opts = {}) {
  const double y = stationary_y(s, L, Q, opts);
  if (s == 1) return {y, Q};
  const double q = Q * detail::geometric_sum(y, s);
  const double q0 = numerics::one_minus_pow_complement(Q, s);
  if (!(q > q0))
    throw NumericError("list_minimizer: q2 = " + std::to_string(q) +
                       " does not exceed 1-(1-Q)^s = " + std::to_string(q0));
  return {y, q};
}

/// Per-Q critical rate h(Q) - q2 h(Q/q2): below it the exponent is linear in R.
inline double critical_rate_at_Q(int s, int L, double Q, numerics::RootOptions opts = {}) {
  const auto p = list_minimizer(s, L, Q, opts);
  return numerics::binary_entropy(Q) - detail::scaled_entropy(Q, p.q);
}

/// Solves h(Q) - q h(Q/q) = R for q in (Q, 1); requires 0 < R < h(Q).
inline double q_at_rate(double R, double Q, numerics::RootOptions opts = {}) {
  if (!(Q > 0.0 && Q < 1.0)) throw DomainError("relative weight Q must lie in (0,1)");
  const double hQ = numerics::binary_entropy(Q);
  if (!(R > 0.0 && R < hQ))
    throw NoSignChange("q_at_rate: no root unless 0 < R < h(Q)");
  return numerics::find_root(
             [&](double q) { return hQ - detail::scaled_entropy(Q, q) - R; }, Q, 1.0, opts)
      .x;
}

/// E_L(s,R,Q) with the branch that produced it.
struct ExponentAtQ {
  double value = 0.0;
  Branch branch = Branch::Linear;
  double q_min = 0.0;          // minimizing union fraction
  double critical_rate = 0.0;  // R_cr(s,L,Q)
  double capacity = 0.0;       // C(s,Q)
};

inline constexpr double kBranchAgreementTol = 1e-9;

/// Piecewise closed form of min over q of A(s,Q,q) + L [h(Q) - q h(Q/q) - R]^+:
/// A_L(s,Q) - L R up to R_cr(s,L,Q), then A(s,Q,q(R)), then 0 from C(s,Q) on.
/// At an exact breakpoint both branches are evaluated and the left one returned.
inline ExponentAtQ exponent_at_Q_detail(int s, int L, double R, double Q,
                                        numerics::RootOptions opts = {}) {
  detail::check_sLQ(s, L, Q);
  if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("rate R must be finite and >= 0");

  ExponentAtQ out;
  const double hQ = numerics::binary_entropy(Q);
  if (s == 1) {
    // The union is a single column: q = Q and E = L [h(Q) - R]^+.
    out.critical_rate = out.capacity = hQ;
    out.q_min = Q;
    out.value = L * numerics::positive_part(hQ - R);
    out.branch = R <= hQ ? Branch::Linear : Branch::Zero;
    return out;
  }

  const double y2 = stationary_y(s, L, Q, opts);
  const double q2 = Q * detail::geometric_sum(y2, s);
  const double q0 = numerics::one_minus_pow_complement(Q, s);
  out.critical_rate = hQ - detail::scaled_entropy(Q, q2);
  out.capacity = hQ - detail::scaled_entropy(Q, q0);
  const double list_exp = detail::list_exponent_from_y(s, L, Q, y2);

  auto curved = [&](double& q) {
    q = q_at_rate(R, Q, opts);
    return union_rate_function(s, Q, q, opts);
  };

  // R = 0 is always on the linear branch, even if rounding pushed R_cr below 0.
  if (R <= out.critical_rate || R == 0.0) {
    out.branch = Branch::Linear;
    out.q_min = q2;
    out.value = list_exp - L * R;
    if (R == out.critical_rate && R > 0.0) {
      double q;
      const double other = curved(q);
      if (std::abs(other - out.value) > kBranchAgreementTol)
        throw NumericError("exponent_at_Q: branches disagree at the critical rate");
    }
    return out;
  }
  if (R <= out.capacity) {
    out.branch = Branch::Curved;
    out.value = curved(out.q_min);
    if (R == out.capacity && std::abs(out.value) > kBranchAgreementTol)
      throw NumericError("exponent_at_Q: branches disagree at capacity");
    return out;
  }
  out.branch = Branch::Zero;
  out.q_min = q0;
  out.value = 0.0;
  return out;
}

inline double exponent_at_Q(int s, int L, double R, double Q, numerics::RootOptions opts = {}) {
  return exponent_at_Q_detail(s, L, R, Q, opts).value;
}

/// Error-exponent lower bound: max over Q of E_L(s,R,Q).
inline BoundResult exponent(int s, int L, double R, const BoundOptions& opts = {}) {
  detail::check_sLQ(s, L, 0.5);
  if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("rate R must be finite and >= 0");
  const auto m = numerics::maximize_scalar(
      [&](double Q) { return exponent_at_Q(s, L, R, Q, opts.root); }, opts.q_lo, opts.q_hi,
      opts.maximize);
  BoundResult r;
  r.value = m.f_star;
  r.argmax_Q = m.x_star;
  r.evaluations = m.evaluations;
  return r;
}

inline constexpr double kLineTol = 1e-8;

/// Largest R in [0, C(s)] at which the optimized exponent still equals the
/// line (s + L - 1) R_rc(s,L) - L R within `line_tol`, found by bisection.
inline BoundResult critical_rate(int s, int L, const BoundOptions& opts = {},
                                 double line_tol = kLineTol) {
  const double rate = random_coding_rate(s, L, opts).value;
  const double cap = capacity(s, opts).value;
  int evaluations = 0;
  auto on_line = [&](double R) {
    const auto e = exponent(s, L, R, opts);
    evaluations += e.evaluations;
    return e.value - ((s + L - 1) * rate - L * R) <= line_tol;
  };
  double lo = 0.0, hi = cap;
  if (on_line(hi)) lo = hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (on_line(mid) ? lo : hi) = mid;
  }
  BoundResult r;
  r.value = lo;
  r.evaluations = evaluations;
  return r;
}

/// dE_L(s,R,Q)/dR on the active branch. Throws DomainError within 1e-9 of a
/// breakpoint, where the one-sided derivatives are not distinguished.
inline double exponent_derivative_at_Q(int s, int L, double R, double Q,
                                       numerics::RootOptions opts = {}) {
  const auto e = exponent_at_Q_detail(s, L, R, Q, opts);
  if (std::abs(R - e.critical_rate) <= 1e-9 || std::abs(R - e.capacity) <= 1e-9)
    throw DomainError("exponent_derivative_at_Q: R is at a branch boundary");
  switch (e.branch) {
    case Branch::Linear: return -static_cast<double>(L);
    case Branch::Zero: return 0.0;
    case Branch::Curved: break;
  }
  const double q = e.q_min;
  const double y = y_of_q(s, Q, q, opts).y;
  const double ys = std::pow(y, s);
  return std::log2(Q * ys / (1.0 - Q - y + Q * ys)) / std::log2((q - Q) / q);
}

struct ExponentSample {
  double R = 0.0;
  double E = 0.0;
  Branch branch = Branch::Linear;
  double slope = 0.0;
  double Q = 0.0;
};

/// Sampled exponent curve, either at a fixed Q or optimized over Q.
struct ExponentCurve {
  int s = 1;
  int L = 1;
  std::optional<double> fixed_Q;
  double critical_rate = 0.0;
  double capacity = 0.0;
  std::vector<ExponentSample> samples;
};

namespace detail {

inline double branch_slope(int s, int L, double Q, const ExponentAtQ& e,
                           numerics::RootOptions opts) {
  switch (e.branch) {
    case Branch::Linear: return -static_cast<double>(L);
    case Branch::Zero: return 0.0;
    case Branch::Curved: break;
  }
  if (s == 1) return 0.0;
  const double q = e.q_min;
  if (q <= Q || q >= q_upper(s, Q)) return 0.0;
  const double y = y_of_q(s, Q, q, opts).y;
  const double ys = std::pow(y, s);
  const double num = Q * ys / (1.0 - Q - y + Q * ys);
  return std::log2(num) / std::log2((q - Q) / q);
}

} // namespace detail

/// Samples E on n evenly spaced rates in [r_lo, r_hi].
inline ExponentCurve exponent_curve(int s, int L, double r_lo, double r_hi, int n,
                                    std::optional<double> fixed_Q = std::nullopt,
                                    const BoundOptions& opts = {}) {
  detail::check_sLQ(s, L, fixed_Q.value_or(0.5));
  if (!(r_lo >= 0.0 && r_hi >= r_lo) || n < 1)
    throw DomainError("exponent_curve: need 0 <= lo <= hi and n >= 1");
  ExponentCurve curve;
  curve.s = s;
  curve.L = L;
  curve.fixed_Q = fixed_Q;
  if (fixed_Q) {
    curve.critical_rate = critical_rate_at_Q(s, L, *fixed_Q, opts.root);
    curve.capacity = capacity_at_Q(s, *fixed_Q);
  } else {
    curve.critical_rate = critical_rate(s, L, opts).value;
    curve.capacity = capacity(s, opts).value;
  }
  curve.samples.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double R = n == 1 ? r_lo : r_lo + (r_hi - r_lo) * i / (n - 1);
    const double Q = fixed_Q ? *fixed_Q : *exponent(s, L, R, opts).argmax_Q;
    const auto e = exponent_at_Q_detail(s, L, R, Q, opts.root);
    curve.samples.push_back({R, e.value, e.branch, detail::branch_slope(s, L, Q, e, opts.root), Q});
  }
  return curve;
}

} // namespace ldlab::bounds

#endif // LDLAB_BOUNDS_HPP
