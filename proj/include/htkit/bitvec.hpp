// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace htkit {

/// Fixed-width unsigned two-value bit vector.
///
/// All arithmetic is modulo 2^width. Bits above `width` in the top word are
/// always kept zero so that word-wise comparison is exact.
class BitVec {
 public:
  BitVec() : BitVec(1) {}
  explicit BitVec(int width, std::uint64_t value = 0);

  static BitVec ones(int width);

  /// Parses digits in the given radix (2, 10 or 16); underscores are skipped.
  /// Throws std::invalid_argument on a bad digit and std::out_of_range when
  /// the value does not fit in `width` bits.
  static BitVec from_digits(int width, int radix, std::string_view digits);

  /// Decimal or "0x"-prefixed hex, sized to `width`.
  static BitVec from_string(int width, std::string_view text);

  int width() const { return width_; }
  int word_count() const { return static_cast<int>(words_.size()); }
  std::uint64_t word(int i) const { return words_[i]; }
  /// Bits beyond the width are dropped.
  void set_word(int i, std::uint64_t w);

  bool bit(int i) const;
  void set_bit(int i, bool v);

  bool is_zero() const;
  /// Number of significant bits (0 for zero).
  int bit_length() const;
  bool fits_u64() const { return bit_length() <= 64; }
  std::uint64_t to_u64() const { return words_[0]; }

  /// Zero-extends or truncates to `width`.
  BitVec resized(int width) const;
  BitVec slice(int msb, int lsb) const;
  void set_slice(int msb, int lsb, const BitVec& v);
  /// {hi, lo}
  static BitVec concat(const BitVec& hi, const BitVec& lo);

  // Operands must share a width; results keep it.
  BitVec operator+(const BitVec& o) const;
  BitVec operator-(const BitVec& o) const;
  BitVec operator&(const BitVec& o) const;
  BitVec operator|(const BitVec& o) const;
  BitVec operator^(const BitVec& o) const;
  BitVec operator~() const;

  /// Unsigned compare, widths may differ.
  static int compare(const BitVec& a, const BitVec& b);

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.width_ == b.width_ && a.words_ == b.words_;
  }

  std::string to_hex() const;
  std::string to_bin() const;
  std::string to_dec() const;
  /// Decimal when it fits in 64 bits, otherwise "0x..." hex.
  std::string to_json_string() const;

 private:
  void mask_top();

  int width_;
  boost::container::small_vector<std::uint64_t, 2> words_;
};

}  // namespace htkit
