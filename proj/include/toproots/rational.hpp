#ifndef TOPROOTS_RATIONAL_HPP
#define TOPROOTS_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include "toproots/errors.hpp"

namespace toproots {

using Int = long long;

// All arithmetic in the toolkit is exact; any overflow is a hard internal
// error rather than a silent wrap.
inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw internal_error("integer overflow in add");
  return r;
}

inline Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw internal_error("integer overflow in sub");
  return r;
}

inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw internal_error("integer overflow in mul");
  return r;
}

inline Int gcd_int(Int a, Int b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }

// Inverse of a modulo m (m >= 1, gcd(a, m) = 1); returns a value in [0, m).
inline Int mod_inverse(Int a, Int m) {
  if (m == 1) return 0;
  Int old_r = ((a % m) + m) % m, r = m;
  Int old_s = 1, s = 0;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  require_internal(old_r == 1, "mod_inverse of a non-unit");
  return ((old_s % m) + m) % m;
}

// Exact rational on 64-bit words, always normalized with den > 0.
struct Rat {
  Int num = 0;
  Int den = 1;

  Rat() = default;
  Rat(Int n) : num(n), den(1) {}  // NOLINT: implicit by design
  Rat(Int n, Int d) : num(n), den(d) { normalize(); }

  void normalize() {
    require_internal(den != 0, "rational with zero denominator");
    if (den < 0) {
      num = checked_sub(0, num);
      den = checked_sub(0, den);
    }
    Int g = gcd_int(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  bool is_integer() const { return den == 1; }

  // Floor division, exact.
  Int floor() const {
    if (num >= 0) return num / den;
    return -(((-num) + den - 1) / den);
  }
  Int ceil() const { return -(Rat(-num, den).floor()); }

  // Fractional part in [0,1).
  Rat frac() const { return *this - Rat(floor()); }

  Rat operator-() const { return Rat(checked_sub(0, num), den); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    Int g = gcd_int(a.den, b.den);
    Int ad = a.den / g;
    Int bd = b.den / g;
    return Rat(checked_add(checked_mul(a.num, bd), checked_mul(b.num, ad)),
               checked_mul(checked_mul(ad, g), bd));
  }
  friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
  friend Rat operator*(const Rat& a, const Rat& b) {
    Int g1 = gcd_int(a.num, b.den);
    Int g2 = gcd_int(b.num, a.den);
    return Rat(checked_mul(a.num / g1, b.num / g2), checked_mul(a.den / g2, b.den / g1));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    require_internal(b.num != 0, "rational division by zero");
    return a * Rat(b.den, b.num);
  }

  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  // Exact "p/q" form; integers print without the "/1".
  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }
};

// Parses "p", "p/q", or a plain integer token. Throws input_error on junk.
Rat parse_rational(const std::string& text);

}  // namespace toproots

#endif
