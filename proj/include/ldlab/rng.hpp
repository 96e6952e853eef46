#ifndef LDLAB_RNG_HPP
#define LDLAB_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace ldlab {

using Engine = std::mt19937_64;

/// Independent engine for stream `stream` of a run seeded with `seed`.
/// Work is split into fixed-size chunks with one stream each, so results do
/// not depend on how chunks are assigned to threads.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6c64u};
  return Engine(seq);
}

/// Draws w distinct indices from [0, n) by partial Fisher-Yates on a scratch
/// permutation. The scratch array is restored afterwards, so it can be reused.
class SubsetSampler {
public:
  explicit SubsetSampler(int n) : perm_(n) {
    for (int i = 0; i < n; ++i) perm_[i] = i;
    swaps_.reserve(n);
  }

  int n() const { return static_cast<int>(perm_.size()); }

  /// Calls visit(index) for each of w chosen indices in draw order. Stops
  /// early if visit returns false; the draws made so far are still uniform.
  template <class Visit>
  bool draw(Engine& gen, int w, Visit&& visit) {
    const int n = this->n();
    bool completed = true;
    for (int i = 0; i < w; ++i) {
      std::uniform_int_distribution<int> pick(i, n - 1);
      const int j = pick(gen);
      std::swap(perm_[i], perm_[j]);
      swaps_.push_back(j);
      if (!visit(perm_[i])) {
        completed = false;
        break;
      }
    }
    for (int i = static_cast<int>(swaps_.size()) - 1; i >= 0; --i) std::swap(perm_[i], perm_[swaps_[i]]);
    swaps_.clear();
    return completed;
  }

private:
  std::vector<int> perm_;
  std::vector<int> swaps_;
};

} // namespace ldlab

#endif // LDLAB_RNG_HPP
