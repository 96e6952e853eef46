#ifndef LDLAB_CODE_HPP
#define LDLAB_CODE_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldlab/errors.hpp"

namespace ldlab {

using Word = std::uint64_t;
inline constexpr int kWordBits = 64;

inline std::size_t words_for(int bits) { return (static_cast<std::size_t>(bits) + kWordBits - 1) / kWordBits; }

/// A binary column of fixed length, packed into 64-bit words.
class BitColumn {
public:
  BitColumn() = default;
  explicit BitColumn(int length) : n_(length), words_(words_for(length), 0) {
    if (length < 0) throw DomainError("BitColumn: negative length");
  }

  /// Parses a string over {0,1}; position 0 is row 0.
  static BitColumn from_string(std::string_view bits) {
    BitColumn c(static_cast<int>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') c.set(static_cast<int>(i));
      else if (bits[i] != '0') throw DomainError("BitColumn: expected only '0' and '1'");
    }
    return c;
  }

  int size() const { return n_; }
  bool get(int i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
  void set(int i, bool v = true) {
    const Word m = Word{1} << (i % kWordBits);
    if (v) words_[i / kWordBits] |= m;
    else words_[i / kWordBits] &= ~m;
  }
  int weight() const {
    int w = 0;
    for (Word x : words_) w += std::popcount(x);
    return w;
  }
  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  BitColumn& operator|=(const BitColumn& o) {
    check_same(o);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  bool operator==(const BitColumn&) const = default;

  std::string to_string() const {
    std::string s(n_, '0');
    for (int i = 0; i < n_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  void check_same(const BitColumn& o) const {
    if (o.n_ != n_) throw DomainError("column length mismatch");
  }

private:
  int n_ = 0;
  std::vector<Word> words_;
};

/// Word-level covering test: u | v == u.
inline bool covers_words(std::span<const Word> u, std::span<const Word> v) {
  for (std::size_t k = 0; k < u.size(); ++k)
    if ((u[k] | v[k]) != u[k]) return false;
  return true;
}

/// u covers v iff u OR v equals u.
inline bool covers(const BitColumn& u, const BitColumn& v) {
  u.check_same(v);
  return covers_words(u.words(), v.words());
}

/// An N x t binary matrix stored column-major as packed words.
class BinaryCode {
public:
  BinaryCode() = default;
  BinaryCode(int n, int t) : n_(n), t_(t), stride_(words_for(n)) {
    if (n < 1 || t < 1) throw DomainError("BinaryCode: need N >= 1 and t >= 1");
    bits_.assign(stride_ * static_cast<std::size_t>(t), 0);
  }

  static BinaryCode identity(int t) {
    BinaryCode c(t, t);
    for (int j = 0; j < t; ++j) c.set(j, j);
    return c;
  }

  static BinaryCode all_ones(int n, int t) {
    BinaryCode c(n, t);
    for (int j = 0; j < t; ++j)
      for (int i = 0; i < n; ++i) c.set(i, j);
    return c;
  }

  /// Builds a code from N row strings of equal length t.
  static BinaryCode from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw DomainError("BinaryCode: no rows");
    BinaryCode c(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < c.n_; ++i) {
      if (static_cast<int>(rows[i].size()) != c.t_) throw DomainError("BinaryCode: ragged rows");
      for (int j = 0; j < c.t_; ++j) {
        const char ch = rows[i][j];
        if (ch == '1') c.set(i, j);
        else if (ch != '0') throw DomainError("BinaryCode: expected only '0' and '1'");
      }
    }
    return c;
  }

  /// Builds a code from column strings, each of length N.
  static BinaryCode from_columns(const std::vector<std::string>& cols) {
    if (cols.empty()) throw DomainError("BinaryCode: no columns");
    BinaryCode c(static_cast<int>(cols[0].size()), static_cast<int>(cols.size()));
    for (int j = 0; j < c.t_; ++j) {
      if (static_cast<int>(cols[j].size()) != c.n_) throw DomainError("BinaryCode: ragged columns");
      for (int i = 0; i < c.n_; ++i) {
        if (cols[j][i] == '1') c.set(i, j);
        else if (cols[j][i] != '0') throw DomainError("BinaryCode: expected only '0' and '1'");
      }
    }
    return c;
  }

  int rows() const { return n_; }
  int cols() const { return t_; }
  std::size_t stride() const { return stride_; }

  bool get(int i, int j) const {
    return (bits_[j * stride_ + i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  void set(int i, int j, bool v = true) {
    Word& w = bits_[j * stride_ + i / kWordBits];
    const Word m = Word{1} << (i % kWordBits);
    if (v) w |= m;
    else w &= ~m;
  }

  std::span<const Word> column_words(int j) const { return {bits_.data() + j * stride_, stride_}; }
  std::span<Word> column_words(int j) { return {bits_.data() + j * stride_, stride_}; }

  BitColumn column(int j) const {
    BitColumn c(n_);
    std::copy(column_words(j).begin(), column_words(j).end(), c.words().begin());
    return c;
  }

  int column_weight(int j) const {
    int w = 0;
    for (Word x : column_words(j)) w += std::popcount(x);
    return w;
  }

  /// The common column weight, if every column has the same weight.
  std::optional<int> constant_weight() const {
    const int w = column_weight(0);
    for (int j = 1; j < t_; ++j)
      if (column_weight(j) != w) return std::nullopt;
    return w;
  }

  std::vector<std::string> to_rows() const {
    std::vector<std::string> out(n_, std::string(t_, '0'));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < t_; ++j)
        if (get(i, j)) out[i][j] = '1';
    return out;
  }

  BinaryCode permute_columns(const std::vector<int>& perm) const {
    BinaryCode c(n_, t_);
    for (int j = 0; j < t_; ++j) {
      auto src = column_words(perm.at(j));
      std::copy(src.begin(), src.end(), c.column_words(j).begin());
    }
    return c;
  }

  BinaryCode permute_rows(const std::vector<int>& perm) const {
    BinaryCode c(n_, t_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < t_; ++j)
        if (get(perm.at(i), j)) c.set(i, j);
    return c;
  }

  bool operator==(const BinaryCode&) const = default;

private:
  int n_ = 0;
  int t_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> bits_;
};

} // namespace ldlab

#endif // LDLAB_CODE_HPP
