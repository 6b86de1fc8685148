#pragma once

// Exact rational scalars and their text form.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace gwcalc {

using Rational = mpq_class;
using RationalMatrix = std::vector<std::vector<Rational>>;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw Error("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// "p/q" form, always with a denominator.
inline std::string to_fraction_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// "p/q", or "p" when the value is an integer.
inline std::string to_display_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return to_fraction_string(r);
}

inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw Error("empty rational literal");
  Rational r;
  if (r.set_str(text, 10) != 0) throw Error("malformed rational literal: " + text);
  if (r.get_den() == 0) throw Error("zero denominator in: " + text);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline Rational power_of_two(int k) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), 2, static_cast<unsigned long>(k));
  return Rational(z);
}

inline Rational factorial(int k) {
  mpz_class z;
  mpz_fac_ui(z.get_mpz_t(), static_cast<unsigned long>(k));
  return Rational(z);
}

inline Rational binomial(int n, int k) {
  if (k < 0 || k > n) return Rational(0);
  mpz_class z;
  mpz_bin_uiui(z.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(z);
}

}  // namespace gwcalc
