// SPDX-License-Identifier: Apache-2.0
#include "htkit/bitvec.hpp"

#include <algorithm>
#include <stdexcept>

namespace htkit {

namespace {

int words_for(int width) { return (width + 63) / 64; }

}  // namespace

BitVec::BitVec(int width, std::uint64_t value) : width_(width) {
  if (width < 1) throw std::invalid_argument("BitVec width must be >= 1");
  words_.assign(words_for(width), 0);
  words_[0] = value;
  mask_top();
}

BitVec BitVec::ones(int width) {
  BitVec v(width);
  for (auto& w : v.words_) w = ~std::uint64_t{0};
  v.mask_top();
  return v;
}

void BitVec::mask_top() {
  int rem = width_ % 64;
  if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

BitVec BitVec::from_digits(int width, int radix, std::string_view digits) {
  // Accumulate at a generous width then check for overflow.
  int acc_width = std::max<int>(width, static_cast<int>(digits.size()) * 4 + 4);
  BitVec acc(acc_width);
  BitVec rad(acc_width, static_cast<std::uint64_t>(radix));
  bool any = false;
  for (char c : digits) {
    if (c == '_') continue;
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      throw std::invalid_argument(std::string("bad digit '") + c + "'");
    }
    if (d >= radix) throw std::invalid_argument(std::string("bad digit '") + c + "'");
    any = true;
    // acc = acc * radix + d, via shift-and-add for radix 2/16 and repeated add for 10.
    BitVec next(acc_width);
    if (radix == 2 || radix == 16) {
      int shift = radix == 2 ? 1 : 4;
      for (int i = acc_width - 1; i >= shift; --i) next.set_bit(i, acc.bit(i - shift));
      if (acc.bit_length() > acc_width - shift) throw std::out_of_range("literal overflow");
    } else {
      BitVec times8(acc_width), times2(acc_width);
      for (int i = acc_width - 1; i >= 3; --i) times8.set_bit(i, acc.bit(i - 3));
      for (int i = acc_width - 1; i >= 1; --i) times2.set_bit(i, acc.bit(i - 1));
      if (acc.bit_length() > acc_width - 4) throw std::out_of_range("literal overflow");
      next = times8 + times2;
    }
    acc = next + BitVec(acc_width, static_cast<std::uint64_t>(d));
  }
  if (!any) throw std::invalid_argument("empty literal");
  if (acc.bit_length() > width) throw std::out_of_range("literal does not fit in width");
  return acc.resized(width);
}

BitVec BitVec::from_string(int width, std::string_view text) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    return from_digits(width, 16, text.substr(2));
  }
  return from_digits(width, 10, text);
}

void BitVec::set_word(int i, std::uint64_t w) {
  words_[i] = w;
  if (i == word_count() - 1) mask_top();
}

bool BitVec::bit(int i) const {
  if (i < 0 || i >= width_) return false;
  return (words_[i / 64] >> (i % 64)) & 1U;
}

void BitVec::set_bit(int i, bool v) {
  if (i < 0 || i >= width_) return;
  std::uint64_t m = std::uint64_t{1} << (i % 64);
  if (v) {
    words_[i / 64] |= m;
  } else {
    words_[i / 64] &= ~m;
  }
}

bool BitVec::is_zero() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

int BitVec::bit_length() const {
  for (int i = word_count() - 1; i >= 0; --i) {
    if (words_[i] != 0) return i * 64 + (64 - __builtin_clzll(words_[i]));
  }
  return 0;
}

BitVec BitVec::resized(int width) const {
  BitVec r(width);
  int n = std::min(word_count(), r.word_count());
  for (int i = 0; i < n; ++i) r.words_[i] = words_[i];
  r.mask_top();
  return r;
}

BitVec BitVec::slice(int msb, int lsb) const {
  BitVec r(msb - lsb + 1);
  if (lsb % 64 == 0 && lsb >= 0) {
    int base = lsb / 64;
    for (int i = 0; i < r.word_count() && base + i < word_count(); ++i) r.words_[i] = words_[base + i];
    r.mask_top();
    return r;
  }
  for (int i = lsb; i <= msb; ++i) r.set_bit(i - lsb, bit(i));
  return r;
}

void BitVec::set_slice(int msb, int lsb, const BitVec& v) {
  for (int i = lsb; i <= msb; ++i) set_bit(i, v.bit(i - lsb));
}

BitVec BitVec::concat(const BitVec& hi, const BitVec& lo) {
  BitVec r = lo.resized(hi.width_ + lo.width_);
  if (lo.width_ % 64 == 0) {
    int base = lo.word_count();
    for (int i = 0; i < hi.word_count(); ++i) r.words_[base + i] = hi.words_[i];
    return r;
  }
  for (int i = 0; i < hi.width_; ++i) r.set_bit(lo.width_ + i, hi.bit(i));
  return r;
}

BitVec BitVec::operator+(const BitVec& o) const {
  BitVec r(width_);
  unsigned __int128 carry = 0;
  for (int i = 0; i < word_count(); ++i) {
    unsigned __int128 s = static_cast<unsigned __int128>(words_[i]) + o.words_[i] + carry;
    r.words_[i] = static_cast<std::uint64_t>(s);
    carry = s >> 64;
  }
  r.mask_top();
  return r;
}

BitVec BitVec::operator-(const BitVec& o) const {
  BitVec one(width_, 1);
  return *this + (~o + one);
}

BitVec BitVec::operator&(const BitVec& o) const {
  BitVec r(width_);
  for (int i = 0; i < word_count(); ++i) r.words_[i] = words_[i] & o.words_[i];
  return r;
}

BitVec BitVec::operator|(const BitVec& o) const {
  BitVec r(width_);
  for (int i = 0; i < word_count(); ++i) r.words_[i] = words_[i] | o.words_[i];
  return r;
}

BitVec BitVec::operator^(const BitVec& o) const {
  BitVec r(width_);
  for (int i = 0; i < word_count(); ++i) r.words_[i] = words_[i] ^ o.words_[i];
  return r;
}

BitVec BitVec::operator~() const {
  BitVec r(width_);
  for (int i = 0; i < word_count(); ++i) r.words_[i] = ~words_[i];
  r.mask_top();
  return r;
}

int BitVec::compare(const BitVec& a, const BitVec& b) {
  int n = std::max(a.word_count(), b.word_count());
  for (int i = n - 1; i >= 0; --i) {
    std::uint64_t x = i < a.word_count() ? a.words_[i] : 0;
    std::uint64_t y = i < b.word_count() ? b.words_[i] : 0;
    if (x != y) return x < y ? -1 : 1;
  }
  return 0;
}

std::string BitVec::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  int nibbles = (width_ + 3) / 4;
  for (int n = nibbles - 1; n >= 0; --n) {
    int v = 0;
    for (int b = 3; b >= 0; --b) v = (v << 1) | (bit(n * 4 + b) ? 1 : 0);
    s.push_back(digits[v]);
  }
  return s;
}

std::string BitVec::to_bin() const {
  std::string s;
  s.reserve(width_);
  for (int i = width_ - 1; i >= 0; --i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

std::string BitVec::to_dec() const {
  if (fits_u64()) return std::to_string(words_[0]);
  // Repeated division by 10 on a word copy.
  boost::container::small_vector<std::uint64_t, 2> w(words_.begin(), words_.end());
  std::string out;
  auto nonzero = [&] { return std::any_of(w.begin(), w.end(), [](std::uint64_t x) { return x != 0; }); };
  while (nonzero()) {
    unsigned __int128 rem = 0;
    for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) {
      unsigned __int128 cur = (rem << 64) | w[i];
      w[i] = static_cast<std::uint64_t>(cur / 10);
      rem = cur % 10;
    }
    out.push_back(static_cast<char>('0' + static_cast<int>(rem)));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string BitVec::to_json_string() const {
  if (fits_u64()) return std::to_string(words_[0]);
  return "0x" + to_hex();
}

}  // namespace htkit
