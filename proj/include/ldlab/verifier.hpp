#ifndef LDLAB_VERIFIER_HPP
#define LDLAB_VERIFIER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ldlab/code.hpp"
#include "ldlab/errors.hpp"
#include "ldlab/parallel.hpp"
#include "ldlab/rng.hpp"

namespace ldlab::verifier {

inline constexpr std::uint64_t kDefaultSubsetBudget = 10'000'000;

/// An s-subset S together with L columns outside S that its union covers.
struct Witness {
  std::vector<int> S;
  std::vector<int> Lambda;
};

struct BadSubsetResult {
  bool bad = false;
  std::optional<Witness> witness;
};

struct BadCountReport {
  int s = 0;
  int L = 0;
  std::uint64_t bad = 0;
  std::uint64_t good = 0;
  std::uint64_t total = 0; // C(t,s), or the number of samples in sampled mode
  double epsilon = 0.0;
  std::optional<Witness> witness;
  bool sampled = false;
  double stderr_ = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_sL(const BinaryCode& X, int s, int L) {
  if (s < 1 || L < 1) throw DomainError("verifier: need s >= 1 and L >= 1");
  if (s + L > X.cols())
    throw DomainError("verifier: s + L = " + std::to_string(s + L) + " exceeds t = " + std::to_string(X.cols()));
}

/// C(n, k), or nullopt if it exceeds `cap`.
inline std::optional<std::uint64_t> binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (c > cap) return std::nullopt;
  }
  return static_cast<std::uint64_t>(c);
}

/// The r-th s-subset of [0, t) in lexicographic order.
inline std::vector<int> unrank_combination(std::uint64_t r, int t, int s) {
  std::vector<int> S(s);
  int x = 0;
  for (int i = 0; i < s; ++i) {
    for (;; ++x) {
      const std::uint64_t below = *binomial_capped(t - x - 1, s - i - 1, std::numeric_limits<std::uint64_t>::max());
      if (r < below) break;
      r -= below;
    }
    S[i] = x++;
  }
  return S;
}

/// Advances S to the next s-subset of [0, t) in lexicographic order.
inline bool next_combination(std::vector<int>& S, int t) {
  const int s = static_cast<int>(S.size());
  int i = s - 1;
  while (i >= 0 && S[i] == t - s + i) --i;
  if (i < 0) return false;
  ++S[i];
  for (int j = i + 1; j < s; ++j) S[j] = S[j - 1] + 1;
  return true;
}

/// Scratch space for repeated bad-subset tests on one code.
class SubsetTester {
public:
  explicit SubsetTester(const BinaryCode& X) : X_(X), u_(X.stride()), in_S_(X.cols(), 0) {}

  /// Number of columns outside S covered by the union of S, stopping once
  /// `stop_at` is reached. Fills `covered` with their indices if non-null.
  int covered_outside(const std::vector<int>& S, int stop_at, std::vector<int>* covered = nullptr) {
    std::fill(u_.begin(), u_.end(), 0);
    for (int j : S) {
      const auto c = X_.column_words(j);
      for (std::size_t k = 0; k < u_.size(); ++k) u_[k] |= c[k];
      in_S_[j] = 1;
    }
    int count = 0;
    for (int j = 0; j < X_.cols() && count < stop_at; ++j) {
      if (in_S_[j]) continue;
      if (covers_words(u_, X_.column_words(j))) {
        ++count;
        if (covered) covered->push_back(j);
      }
    }
    for (int j : S) in_S_[j] = 0;
    return count;
  }

private:
  const BinaryCode& X_;
  std::vector<Word> u_;
  std::vector<unsigned char> in_S_;
};

inline void check_subset(const BinaryCode& X, const std::vector<int>& S) {
  std::vector<int> sorted = S;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= X.cols())
      throw DomainError("verifier: column index " + std::to_string(sorted[i]) + " out of range");
    if (i > 0 && sorted[i] == sorted[i - 1]) throw DomainError("verifier: repeated column index in S");
  }
}

} // namespace detail

/// S is s_L-bad iff its union covers at least L columns outside S. The witness
/// holds the first L such columns in index order.
inline BadSubsetResult is_bad_subset(const BinaryCode& X, const std::vector<int>& S, int L) {
  detail::check_sL(X, static_cast<int>(S.size()), L);
  detail::check_subset(X, S);
  detail::SubsetTester tester(X);
  std::vector<int> covered;
  BadSubsetResult r;
  r.bad = tester.covered_outside(S, L, &covered) >= L;
  if (r.bad) {
    std::vector<int> sorted = S;
    std::sort(sorted.begin(), sorted.end());
    r.witness = Witness{sorted, covered};
  }
  return r;
}

/// Exact counts over all C(t,s) subsets, enumerated in lexicographic order.
/// The witness is the first bad subset in that order.
inline BadCountReport count_bad(const BinaryCode& X, int s, int L, std::uint64_t budget = kDefaultSubsetBudget,
                                unsigned threads = default_threads()) {
  detail::check_sL(X, s, L);
  const int t = X.cols();
  const auto total = detail::binomial_capped(t, s, budget);
  if (!total)
    throw BudgetExceeded("count_bad: C(" + std::to_string(t) + ", " + std::to_string(s) +
                         ") subsets exceed the budget of " + std::to_string(budget) + "; use sampled mode");

  const std::uint64_t n = *total;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, std::min<std::uint64_t>(1 << 16, n / (4 * std::max(1u, threads)) + 1));
  const std::size_t chunks = static_cast<std::size_t>((n + chunk - 1) / chunk);
  std::vector<std::uint64_t> bad(chunks, 0);
  std::vector<std::optional<Witness>> first(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t begin = c * chunk, end = std::min(n, begin + chunk);
    auto S = detail::unrank_combination(begin, t, s);
    detail::SubsetTester tester(X);
    std::vector<int> covered;
    std::uint64_t local = 0;
    for (std::uint64_t r = begin; r < end; ++r) {
      covered.clear();
      if (tester.covered_outside(S, L, &covered) >= L) {
        ++local;
        if (!first[c]) first[c] = Witness{S, covered};
      }
      if (r + 1 < end) detail::next_combination(S, t);
    }
    bad[c] = local;
  });

  BadCountReport rep;
  rep.s = s;
  rep.L = L;
  rep.total = n;
  for (std::size_t c = 0; c < chunks; ++c) {
    rep.bad += bad[c];
    if (!rep.witness && first[c]) rep.witness = first[c];
  }
  rep.good = n - rep.bad;
  rep.epsilon = static_cast<double>(rep.bad) / static_cast<double>(n);
  return rep;
}

inline constexpr std::uint64_t kSamplesPerStream = 4096;

/// Estimates epsilon from `samples` independent uniform s-subsets.
inline BadCountReport count_bad_sampled(const BinaryCode& X, int s, int L, std::uint64_t samples,
                                        std::uint64_t seed, unsigned threads = default_threads()) {
  detail::check_sL(X, s, L);
  if (samples < 1) throw DomainError("count_bad_sampled: samples must be positive");
  const std::size_t chunks = static_cast<std::size_t>((samples + kSamplesPerStream - 1) / kSamplesPerStream);
  std::vector<std::uint64_t> bad(chunks, 0);
  std::vector<std::optional<Witness>> first(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Engine gen = make_stream(seed, c);
    SubsetSampler sampler(X.cols());
    detail::SubsetTester tester(X);
    std::vector<int> S, covered;
    const std::uint64_t begin = c * kSamplesPerStream, end = std::min(samples, begin + kSamplesPerStream);
    std::uint64_t local = 0;
    for (std::uint64_t r = begin; r < end; ++r) {
      S.clear();
      sampler.draw(gen, s, [&](int j) {
        S.push_back(j);
        return true;
      });
      std::sort(S.begin(), S.end());
      covered.clear();
      if (tester.covered_outside(S, L, &covered) >= L) {
        ++local;
        if (!first[c]) first[c] = Witness{S, covered};
      }
    }
    bad[c] = local;
  });

  BadCountReport rep;
  rep.s = s;
  rep.L = L;
  rep.total = samples;
  rep.sampled = true;
  rep.seed = seed;
  for (std::size_t c = 0; c < chunks; ++c) {
    rep.bad += bad[c];
    if (!rep.witness && first[c]) rep.witness = first[c];
  }
  rep.good = samples - rep.bad;
  rep.epsilon = static_cast<double>(rep.bad) / static_cast<double>(samples);
  rep.stderr_ = std::sqrt(rep.epsilon * (1.0 - rep.epsilon) / static_cast<double>(samples));
  return rep;
}

/// X is an LD (s_L, epsilon)-code iff at most an epsilon fraction of its
/// s-subsets are s_L-bad.
inline bool is_ld_code(const BinaryCode& X, int s, int L, double epsilon,
                       std::uint64_t budget = kDefaultSubsetBudget, unsigned threads = default_threads()) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("is_ld_code: epsilon must lie in [0,1)");
  return count_bad(X, s, L, budget, threads).epsilon <= epsilon;
}

} // namespace ldlab::verifier

#endif // LDLAB_VERIFIER_HPP
