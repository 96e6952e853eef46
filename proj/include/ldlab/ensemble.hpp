#ifndef LDLAB_ENSEMBLE_HPP
#define LDLAB_ENSEMBLE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "ldlab/code.hpp"
#include "ldlab/errors.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/rng.hpp"

namespace ldlab::ensemble {

inline constexpr int kMaxEnumerationStrength = 5;

/// Largest N accepted by union_size_pmf, by strength.
struct EnumerationBudget {
  int max_n_up_to_3 = 400;
  int max_n_4_5 = 80;

  int max_n(int s) const { return s <= 3 ? max_n_up_to_3 : max_n_4_5; }
};

/// Rounding of 2^{RN} to an integer code size.
enum class SizeRounding { Ceil, Floor };

/// Parameters of the constant-weight ensemble {N, t, Q}: t i.i.d. columns,
/// each uniform over the C(N, w) columns of weight w.
struct EnsembleSpec {
  int N = 0;
  std::int64_t t = 0;
  double Q = 0.0;
  int w = 0;
  std::uint64_t seed = 0;

  /// w = floor(QN). The small slack absorbs products like 0.3 * 10 = 2.9999999999999996.
  static EnsembleSpec from_Q(int N, std::int64_t t, double Q, std::uint64_t seed = 0) {
    if (!(Q > 0.0 && Q < 1.0)) throw DomainError("ensemble: Q must lie in (0,1)");
    EnsembleSpec e;
    e.N = N;
    e.t = t;
    e.Q = Q;
    e.w = static_cast<int>(std::floor(Q * N + 1e-9));
    e.seed = seed;
    e.validate();
    return e;
  }

  static EnsembleSpec with_weight(int N, std::int64_t t, int w, std::uint64_t seed = 0) {
    EnsembleSpec e;
    e.N = N;
    e.t = t;
    e.w = w;
    e.Q = N > 0 ? static_cast<double>(w) / N : 0.0;
    e.seed = seed;
    e.validate();
    return e;
  }

  void validate() const {
    if (N < 2) throw DomainError("ensemble: N must be at least 2");
    if (t < 1) throw DomainError("ensemble: t must be positive");
    if (w < 1 || w > N - 1) throw DomainError("ensemble: column weight must satisfy 1 <= w <= N-1");
  }
};

/// t = ceil(2^{RN}) (or floor). The relative slack keeps exact powers of two
/// from being pushed up by rounding in R*N.
inline std::int64_t code_size(double R, int N, SizeRounding rounding = SizeRounding::Ceil) {
  if (!(R >= 0.0)) throw DomainError("code_size: R must be >= 0");
  const double x = std::exp2(R * N);
  if (x > 9.0e15) throw DomainError("code_size: 2^{RN} too large");
  return rounding == SizeRounding::Ceil ? static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12)))
                                        : static_cast<std::int64_t>(std::floor(x * (1.0 + 1e-12)));
}

// ------------------------------------------------------------ log-space helpers

namespace detail {

/// log(n!) for n = 0..max.
inline std::vector<double> log_factorials(int max) {
  std::vector<double> lf(max + 1, 0.0);
  long double acc = 0.0L;
  for (int i = 2; i <= max; ++i) {
    acc += std::log(static_cast<long double>(i));
    lf[i] = static_cast<double>(acc);
  }
  return lf;
}

inline double log_binomial(const std::vector<double>& lf, int n, int k) {
  return lf[n] - lf[k] - lf[n - k];
}

/// log C(n, L) for large n and small L, as a product of L ratios.
inline double log_binomial_small_k(std::int64_t n, int L) {
  if (L < 0 || L > n) return -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int i = 0; i < L; ++i) acc += std::log(static_cast<double>(n - i) / (L - i));
  return acc;
}

/// log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

} // namespace detail

// ---------------------------------------------------------------------- types

/// Counts n(a) of the row patterns a in {0,1}^s across N rows; index a is the
/// bitmask with bit i set when column i has a one in that row.
struct TypeDistribution {
  int s = 0;
  int N = 0;
  std::vector<int> counts;

  double tau(unsigned a) const { return static_cast<double>(counts.at(a)) / N; }
  int union_size() const { return N - counts.at(0); }
  int marginal(int i) const {
    int m = 0;
    for (unsigned a = 0; a < counts.size(); ++a)
      if (a >> i & 1u) m += counts[a];
    return m;
  }
};

namespace detail {

inline void check_type_args(int s, int N, int w) {
  if (s < 1) throw DomainError("ensemble: s must be >= 1");
  if (s > kMaxEnumerationStrength) throw DomainError("ensemble: type enumeration supports s <= 5");
  if (N < 1 || w < 0 || w > N) throw DomainError("ensemble: need 0 <= w <= N");
}

} // namespace detail

/// Calls visit(counts) for every type with n(0) = N-k and all s marginals
/// equal to w. Free counts are those of patterns with 2..s-1 ones, in
/// increasing mask order; the singleton and all-ones counts are then forced.
template <class Visit>
void for_each_type(int s, int N, int w, int k, Visit&& visit) {
  detail::check_type_args(s, N, w);
  if (k < w || k > std::min(N, s * w)) return;
  const unsigned full = (1u << s) - 1;
  std::vector<int> counts(full + 1, 0);
  counts[0] = N - k;
  if (s == 1) {
    counts[1] = w;
    visit(std::as_const(counts));
    return;
  }
  std::vector<unsigned> free_masks;
  for (unsigned a = 1; a < full; ++a)
    if (std::popcount(a) >= 2) free_masks.push_back(a);

  // Sum over nonzero patterns of (|a| - 1) n(a) must equal s*w - k.
  const int excess_target = s * w - k;
  std::vector<int> used(s, 0);

  auto finish = [&](int excess) {
    const int rem = excess_target - excess;
    if (rem < 0 || rem % (s - 1) != 0) return;
    const int x = rem / (s - 1);
    for (int i = 0; i < s; ++i)
      if (used[i] + x > w) return;
    counts[full] = x;
    for (int i = 0; i < s; ++i) counts[1u << i] = w - used[i] - x;
    visit(std::as_const(counts));
  };

  auto rec = [&](auto& self, std::size_t idx, int excess) -> void {
    if (idx == free_masks.size()) {
      finish(excess);
      return;
    }
    const unsigned a = free_masks[idx];
    const int extra = std::popcount(a) - 1;
    int cap = (excess_target - excess) / extra;
    for (int i = 0; i < s; ++i)
      if (a >> i & 1u) cap = std::min(cap, w - used[i]);
    for (int n = 0; n <= cap; ++n) {
      counts[a] = n;
      for (int i = 0; i < s; ++i)
        if (a >> i & 1u) used[i] += n;
      self(self, idx + 1, excess + extra * n);
      for (int i = 0; i < s; ++i)
        if (a >> i & 1u) used[i] -= n;
    }
    counts[a] = 0;
  };
  rec(rec, 0, 0);
}

inline std::vector<TypeDistribution> enumerate_types(int s, int N, int w, int k) {
  std::vector<TypeDistribution> out;
  for_each_type(s, N, w, k, [&](const std::vector<int>& c) { out.push_back({s, N, c}); });
  return out;
}

// ------------------------------------------------------------- union size pmf

/// Distribution of the union size k of s i.i.d. uniform weight-w columns.
struct UnionSizePmf {
  int s = 0;
  int N = 0;
  int w = 0;
  int k_min = 0;
  std::vector<double> log_p; // natural log, index k - k_min

  int k_max() const { return k_min + static_cast<int>(log_p.size()) - 1; }
  double p(int k) const {
    if (k < k_min || k > k_max()) return 0.0;
    return std::exp(log_p[k - k_min]);
  }
  double log2_p(int k) const {
    if (k < k_min || k > k_max()) return -std::numeric_limits<double>::infinity();
    return log_p[k - k_min] / std::log(2.0);
  }
  double total() const {
    double acc = 0.0;
    for (double lp : log_p) acc += std::exp(lp);
    return acc;
  }
};

/// How union_size_pmf evaluates the sum over types.
enum class PmfMethod {
  Auto,      ///< TypeSum for s <= 3, Collapsed otherwise
  TypeSum,   ///< enumerate every type for every k
  Collapsed, ///< group types by the union of the first columns
};

namespace detail {

inline void check_pmf_budget(int s, int N, const EnumerationBudget& budget) {
  if (N > budget.max_n(s))
    throw BudgetExceeded("union_size_pmf: N = " + std::to_string(N) + " exceeds the enumeration budget " +
                         std::to_string(budget.max_n(s)) + " for s = " + std::to_string(s));
}

/// p_k = C(N,w)^{-s} * sum over types of N! / prod_a n(a)!. Accumulated in
/// long double: a single k can have ~10^6 terms near N = 400.
inline std::vector<double> pmf_type_sum(int s, int N, int w) {
  std::vector<long double> lf(N + 1, 0.0L);
  for (int i = 2; i <= N; ++i) lf[i] = lf[i - 1] + std::log(static_cast<long double>(i));
  const long double log_norm = s * (lf[N] - lf[w] - lf[N - w]);
  std::vector<double> out;
  for (int k = w; k <= std::min(N, s * w); ++k) {
    // Terms are summed relative to the first one and rescaled when a larger one appears.
    long double ref = 0.0L, sum = 0.0L;
    bool first = true;
    for_each_type(s, N, w, k, [&](const std::vector<int>& c) {
      long double term = lf[N];
      for (int n : c) term -= lf[n];
      if (first) {
        ref = term;
        sum = 1.0L;
        first = false;
      } else if (term > ref) {
        sum = sum * std::exp(ref - term) + 1.0L;
        ref = term;
      } else {
        sum += std::exp(term - ref);
      }
    });
    out.push_back(first ? -std::numeric_limits<double>::infinity()
                        : static_cast<double>(ref + std::log(sum) - log_norm));
  }
  return out;
}

/// Same sum with the types grouped by the union size k' of the first c
/// columns: column c+1 meets that union in w-j rows and adds j new ones,
/// and summing over its pattern counts gives C(k', w-j) C(N-k', j).
inline std::vector<double> pmf_collapsed(int s, int N, int w, const std::vector<double>& lf) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const double log_cols = log_binomial(lf, N, w);
  std::vector<double> cur(N + 1, ninf), next(N + 1);
  cur[w] = 0.0;
  for (int c = 1; c < s; ++c) {
    std::fill(next.begin(), next.end(), ninf);
    for (int k = w; k <= N; ++k) {
      if (cur[k] == ninf) continue;
      for (int j = std::max(0, w - k); j <= std::min(w, N - k); ++j)
        next[k + j] = log_add(next[k + j],
                              cur[k] + log_binomial(lf, k, w - j) + log_binomial(lf, N - k, j) - log_cols);
    }
    cur.swap(next);
  }
  return {cur.begin() + w, cur.begin() + std::min(N, s * w) + 1};
}

} // namespace detail

/// Distribution of the union size of s i.i.d. uniform weight-w columns,
/// computed in log space.
inline UnionSizePmf union_size_pmf(int s, int N, int w, const EnumerationBudget& budget = {},
                                   PmfMethod method = PmfMethod::Auto) {
  detail::check_type_args(s, N, w);
  detail::check_pmf_budget(s, N, budget);
  if (method == PmfMethod::Auto) method = s <= 3 ? PmfMethod::TypeSum : PmfMethod::Collapsed;
  const auto lf = detail::log_factorials(N);
  UnionSizePmf pmf{s, N, w, w, {}};
  pmf.log_p = method == PmfMethod::TypeSum ? detail::pmf_type_sum(s, N, w)
                                           : detail::pmf_collapsed(s, N, w, lf);
  return pmf;
}

// ----------------------------------------------------------- bad probability

/// C(k,w) / C(N,w): probability that a uniform weight-w column lies inside a
/// fixed support of size k.
inline double cover_prob(int N, int w, int k) {
  if (w < 0 || w > k || k > N) throw DomainError("cover_prob: need 0 <= w <= k <= N");
  const auto lf = detail::log_factorials(N);
  return std::exp(detail::log_binomial(lf, k, w) - detail::log_binomial(lf, N, w));
}

/// P{Bin(n, p) >= L}.
inline double binomial_upper_tail(std::int64_t n, double p, int L) {
  if (L <= 0) return 1.0;
  if (L > n || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(L), static_cast<double>(n - L + 1), p);
}

/// D(s, L) = min(D1, D2, 1/2) from the second-moment argument for the lower bound.
inline double second_moment_constant(int s, int L) {
  const double c = std::pow(1.5, 1.0 / L) - 1.0;
  const double d1 = 0.5 * std::pow(c / (s + L + 1), L);
  const double d2 = std::pow(c / (s + L), L);
  return std::min({d1, d2, 0.5});
}

/// Exact ensemble bad-probability with the union upper bound and the
/// second-moment lower bound evaluated on the same union-size distribution.
struct BadProbability {
  double exact = 0.0;
  double log2_exact = -std::numeric_limits<double>::infinity();
  double union_bound = 0.0;
  double lower_bound = 0.0;
  double lower_constant = 0.0;
};

namespace detail {

inline void check_sL(int s, int L) {
  if (s < 1 || L < 1) throw DomainError("ensemble: need s >= 1 and L >= 1");
}

} // namespace detail

inline BadProbability bad_probability(int s, int L, const EnsembleSpec& spec,
                                      const EnumerationBudget& budget = {}) {
  detail::check_sL(s, L);
  spec.validate();
  BadProbability out;
  out.lower_constant = second_moment_constant(s, L);
  const std::int64_t others = spec.t - s;
  if (others < L) return out;

  const auto pmf = union_size_pmf(s, spec.N, spec.w, budget);
  const auto lf = detail::log_factorials(spec.N);
  const double log_pairs = detail::log_binomial_small_k(others, L);
  double log_acc = -std::numeric_limits<double>::infinity();
  for (int k = pmf.k_min; k <= pmf.k_max(); ++k) {
    const double lpk = pmf.log_p[k - pmf.k_min];
    const double log_c = detail::log_binomial(lf, k, spec.w) - detail::log_binomial(lf, spec.N, spec.w);
    const double tail = binomial_upper_tail(others, std::exp(log_c), L);
    if (tail > 0.0) log_acc = detail::log_add(log_acc, lpk + std::log(tail));
    const double pk = std::exp(lpk);
    const double ub = std::exp(std::min(0.0, log_pairs + L * log_c));
    out.union_bound += pk * ub;
  }
  out.exact = std::exp(log_acc);
  out.log2_exact = log_acc / std::log(2.0);
  out.lower_bound = out.lower_constant * out.union_bound;
  return out;
}

/// Sum over k of p_k * P{Bin(t-s, cover_prob(N,w,k)) >= L}; 0 when t - s < L.
inline double exact_bad_prob(int s, int L, const EnsembleSpec& spec, const EnumerationBudget& budget = {}) {
  return bad_probability(s, L, spec, budget).exact;
}

inline double exact_bad_prob_log2(int s, int L, const EnsembleSpec& spec,
                                  const EnumerationBudget& budget = {}) {
  return bad_probability(s, L, spec, budget).log2_exact;
}

// ----------------------------------------------------------------- sampling

/// Draws a code from the ensemble: `columns` columns (default spec.t), each a
/// uniform weight-w column. Equal seeds give equal codes.
inline BinaryCode sample_code(const EnsembleSpec& spec, std::optional<int> columns = std::nullopt) {
  spec.validate();
  const std::int64_t t = columns.value_or(static_cast<int>(std::min<std::int64_t>(spec.t, 1 << 24)));
  if (t < 1) throw DomainError("sample_code: need at least one column");
  BinaryCode code(spec.N, static_cast<int>(t));
  Engine gen = make_stream(spec.seed, 0);
  SubsetSampler sampler(spec.N);
  for (int j = 0; j < t; ++j)
    sampler.draw(gen, spec.w, [&](int r) {
      code.set(r, j);
      return true;
    });
  return code;
}

struct MonteCarloEstimate {
  std::int64_t trials = 0;
  std::int64_t hits = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::uint64_t seed = 0;

  static MonteCarloEstimate from_counts(std::int64_t trials, std::int64_t hits, std::uint64_t seed) {
    MonteCarloEstimate m{trials, hits, 0.0, 0.0, seed};
    m.estimate = trials > 0 ? static_cast<double>(hits) / trials : 0.0;
    m.stderr_ = trials > 0 ? std::sqrt(m.estimate * (1.0 - m.estimate) / trials) : 0.0;
    return m;
  }
};

inline constexpr std::int64_t kTrialsPerStream = 4096;

/// Monte Carlo estimate of the ensemble bad-probability. Each trial draws the
/// s columns of S, then draws further columns one at a time until L of them
/// are covered or t - s have been drawn. A column draw stops at its first row
/// outside the union: the rows already drawn are uniform, so whether the
/// column is covered has the right law, and the skipped rows are never looked at.
inline MonteCarloEstimate monte_carlo_bad_prob(int s, int L, const EnsembleSpec& spec, std::int64_t trials,
                                               unsigned threads = default_threads()) {
  detail::check_sL(s, L);
  spec.validate();
  if (trials < 1) throw DomainError("monte_carlo_bad_prob: trials must be positive");
  const std::int64_t others = spec.t - s;
  if (others < L) return MonteCarloEstimate::from_counts(trials, 0, spec.seed);

  const std::size_t chunks = static_cast<std::size_t>((trials + kTrialsPerStream - 1) / kTrialsPerStream);
  std::vector<std::int64_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Engine gen = make_stream(spec.seed, c + 1);
    SubsetSampler sampler(spec.N);
    std::vector<unsigned char> in_union(spec.N, 0);
    const std::int64_t begin = static_cast<std::int64_t>(c) * kTrialsPerStream;
    const std::int64_t end = std::min(trials, begin + kTrialsPerStream);
    std::int64_t local = 0;
    for (std::int64_t trial = begin; trial < end; ++trial) {
      std::fill(in_union.begin(), in_union.end(), 0);
      for (int i = 0; i < s; ++i)
        sampler.draw(gen, spec.w, [&](int r) {
          in_union[r] = 1;
          return true;
        });
      int covered = 0;
      for (std::int64_t j = 0; j < others && covered < L; ++j) {
        if (covered + (others - j) < L) break;
        if (sampler.draw(gen, spec.w, [&](int r) { return in_union[r] != 0; })) ++covered;
      }
      if (covered >= L) ++local;
    }
    hits[c] = local;
  });
  std::int64_t total = 0;
  for (auto h : hits) total += h;
  return MonteCarloEstimate::from_counts(trials, total, spec.seed);
}

// -------------------------------------------------------- empirical exponent

struct ExponentPoint {
  int N = 0;
  int w = 0;
  std::int64_t t = 0;
  double log2_prob = 0.0;
  double exponent = 0.0; // -log2(prob) / N
  double residual = 0.0; // of the linear fit of -log2(prob) against N
};

struct EmpiricalExponent {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<ExponentPoint> points;
};

/// Fits -log2 exact_bad_prob(N) = slope * N + intercept over the given N with
/// w = floor(QN) and t = ceil(2^{RN}).
inline EmpiricalExponent empirical_exponent(int s, int L, double R, double Q, const std::vector<int>& Ns,
                                            SizeRounding rounding = SizeRounding::Ceil,
                                            const EnumerationBudget& budget = {}) {
  detail::check_sL(s, L);
  if (Ns.size() < 2) throw DomainError("empirical_exponent: need at least two values of N");
  EmpiricalExponent out;
  for (int N : Ns) {
    const auto spec = EnsembleSpec::from_Q(N, code_size(R, N, rounding), Q);
    if (spec.t < s + L)
      throw DomainError("empirical_exponent: t = " + std::to_string(spec.t) + " < s + L at N = " +
                        std::to_string(N));
    const double lp = exact_bad_prob_log2(s, L, spec, budget);
    if (!std::isfinite(lp)) throw NumericError("empirical_exponent: probability underflow at N = " + std::to_string(N));
    out.points.push_back({N, spec.w, spec.t, lp, -lp / N, 0.0});
  }
  double mx = 0.0, my = 0.0;
  for (const auto& p : out.points) {
    mx += p.N;
    my += -p.log2_prob;
  }
  const double n = static_cast<double>(out.points.size());
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : out.points) {
    sxy += (p.N - mx) * (-p.log2_prob - my);
    sxx += (p.N - mx) * (p.N - mx);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  for (auto& p : out.points) p.residual = -p.log2_prob - (out.slope * p.N + out.intercept);
  return out;
}

} // namespace ldlab::ensemble

#endif // LDLAB_ENSEMBLE_HPP
