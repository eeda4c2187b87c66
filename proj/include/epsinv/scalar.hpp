#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "epsinv/errors.hpp"

namespace epsinv {

// Exact scalar backing: arbitrary-precision rationals.  All core algorithms are
// templated on the scalar type so the same code runs exactly (Rational) or fast
// (double) with a mode-dependent comparison tolerance.
using Rational = boost::multiprecision::cpp_rational;

template <class S>
struct scalar_traits;

namespace detail {

// Parse "p/q", "p", or a decimal like "-0.125" or "2.5e-3" into an exact
// rational.  Decimal digits are converted via powers of ten, so nothing is
// lost.
inline Rational parse_rational(const std::string& raw) {
  using Int = boost::multiprecision::cpp_int;
  std::string s = raw;
  s.erase(0, s.find_first_not_of(" \t"));
  if (!s.empty()) s.erase(s.find_last_not_of(" \t") + 1);
  if (s.empty()) throw InvalidInput("empty scalar literal");

  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    negative = (s[i] == '-');
    ++i;
  }

  auto digits = [&](Int& out) {
    std::size_t start = i;
    out = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      out = out * 10 + (s[i] - '0');
      ++i;
    }
    return i > start;
  };

  Int whole;
  if (!digits(whole)) throw InvalidInput("bad scalar literal: " + raw);

  Rational value;
  if (i < s.size() && s[i] == '/') {
    ++i;
    Int den;
    if (!digits(den) || i != s.size() || den == 0)
      throw InvalidInput("bad scalar literal: " + raw);
    return negative ? Rational(-Rational(whole, den)) : Rational(whole, den);
  }
  value = Rational(whole);
  if (i < s.size() && s[i] == '.') {
    ++i;
    Int frac = 0;
    Int scale = 1;
    std::size_t start = i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
      frac = frac * 10 + (s[i] - '0');
      scale *= 10;
      ++i;
    }
    if (i == start) throw InvalidInput("bad scalar literal: " + raw);
    value += Rational(frac, scale);
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_negative = (s[i] == '-');
      ++i;
    }
    Int exp;
    if (!digits(exp) || exp > 4096)
      throw InvalidInput("bad scalar literal: " + raw);
    Int pow10 = 1;
    for (Int k = 0; k < exp; ++k) pow10 *= 10;
    if (exp_negative) {
      value /= Rational(pow10);
    } else {
      value *= Rational(pow10);
    }
  }
  if (i != s.size()) throw InvalidInput("bad scalar literal: " + raw);
  return negative ? Rational(-value) : value;
}

}  // namespace detail

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static Rational tolerance() { return Rational(0); }
  static bool finite(const Rational&) { return true; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static Rational parse(const std::string& s) { return detail::parse_rational(s); }
  static std::string to_string(const Rational& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
  }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static double tolerance() { return 1e-12; }
  static bool finite(double x) { return std::isfinite(x); }
  static double to_double(double x) { return x; }
  static double parse(const std::string& s) {
    // Same literal grammar as the exact mode ("p/q" included) so inputs are
    // mode-portable; the exact value is rounded once at the end.
    double v = detail::parse_rational(s).convert_to<double>();
    if (!std::isfinite(v)) throw InvalidInput("scalar literal overflows: " + s);
    return v;
  }
  static std::string to_string(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
  }
};

template <class S>
S sabs(const S& x) {
  using std::abs;
  return x < S(0) ? S(-x) : S(x);
}

template <class S>
const S& smin(const S& a, const S& b) {
  return b < a ? b : a;
}

template <class S>
const S& smax(const S& a, const S& b) {
  return a < b ? b : a;
}

// Mode-aware comparisons: exact in rational mode (tolerance 0), fuzzy in
// double mode.  The exact branches avoid building `b + tol` temporaries,
// which dominate the cost of large interval-set sweeps.
template <class S>
bool approx_zero(const S& x) {
  if constexpr (scalar_traits<S>::exact) {
    return x == S(0);
  } else {
    return sabs(x) <= scalar_traits<S>::tolerance();
  }
}

template <class S>
bool approx_eq(const S& a, const S& b) {
  if constexpr (scalar_traits<S>::exact) {
    return a == b;
  } else {
    return sabs(S(a - b)) <= scalar_traits<S>::tolerance();
  }
}

template <class S>
bool approx_leq(const S& a, const S& b) {
  if constexpr (scalar_traits<S>::exact) {
    return a <= b;
  } else {
    return a <= b + scalar_traits<S>::tolerance();
  }
}

template <class S>
S pow_int(S base, unsigned e) {
  S out(1);
  while (e) {
    if (e & 1u) out *= base;
    base *= base;
    e >>= 1u;
  }
  return out;
}

// Shorthand for building p/q in whichever scalar mode is active.
template <class S>
S frac(long long p, long long q) {
  return S(p) / S(q);
}

template <class S>
double to_double(const S& x) {
  return scalar_traits<S>::to_double(x);
}

}  // namespace epsinv
