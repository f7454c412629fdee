#pragma once

// Scalar modes. Exact mode uses GMP rationals, floating mode uses double.
// Every algorithm in the library is a template over one of the two; a
// computation never mixes them.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace minex {

using Rational = mpq_class;

enum class ScalarMode { exact, floating };

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when exact arithmetic is requested for something that cannot be
/// evaluated exactly, or when exact and floating data are mixed.
class ModeError : public Error {
 public:
  using Error::Error;
};

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr ScalarMode mode = ScalarMode::exact;
  static constexpr bool is_exact = true;
  static constexpr const char* name = "exact";
};

template <>
struct scalar_traits<double> {
  static constexpr ScalarMode mode = ScalarMode::floating;
  static constexpr bool is_exact = false;
  static constexpr const char* name = "float";
};

template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

template <Scalar T>
inline constexpr bool is_exact_v = scalar_traits<T>::is_exact;

inline const char* mode_name(ScalarMode m) {
  return m == ScalarMode::exact ? "exact" : "float";
}

inline ScalarMode parse_mode(std::string_view s) {
  if (s == "exact") return ScalarMode::exact;
  if (s == "float" || s == "floating") return ScalarMode::floating;
  throw Error("unknown scalar mode '" + std::string(s) + "' (expected exact|float)");
}

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline int sign_of(const Rational& q) { return sgn(q); }
inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

inline Rational abs_value(const Rational& q) { return abs(q); }
inline double abs_value(double x) { return std::fabs(x); }

/// Parses "p/q", "-7", or a finite decimal such as "0.125" into an exact
/// rational. Decimal strings are converted exactly ("0.1" is 1/10).
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) throw Error("empty rational literal");
  auto bad = [&] { return Error("malformed rational literal '" + std::string(text) + "'"); };

  auto is_int = [](std::string_view t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto strip_plus = [](std::string t) {
    if (!t.empty() && t[0] == '+') t.erase(t.begin());
    return t;
  };

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+') throw bad();
    mpz_class n(strip_plus(num)), d(den);
    if (d == 0) throw Error("zero denominator in '" + std::string(text) + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip.erase(ip.begin());
    if (ip.empty()) ip = "0";
    if (fp.empty() || !is_int(ip) || !is_int(fp) || fp[0] == '-' || fp[0] == '+') throw bad();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Rational q(mpz_class(ip) * scale + mpz_class(fp), scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }
  if (!is_int(s)) throw bad();
  return Rational(mpz_class(strip_plus(s)));
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Exact conversion of a finite double to a rational (doubles are dyadic).
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error("non-finite value cannot be made exact");
  return Rational(x);
}

template <Scalar T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>) {
    return q;
  } else {
    return q.get_d();
  }
}

template <Scalar T>
T from_int(long v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return Rational(v);
  } else {
    return static_cast<double>(v);
  }
}

/// `a <= b + tol` in floating mode; exact comparison in exact mode.
template <Scalar T>
bool leq_tol(const T& a, const T& b, double tol) {
  if constexpr (is_exact_v<T>) {
    return a <= b;
  } else {
    return a <= b + tol;
  }
}

template <Scalar T>
bool eq_tol(const T& a, const T& b, double tol) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return std::fabs(a - b) <= tol;
  }
}

template <Scalar T>
bool is_zero_tol(const T& a, double tol) {
  if constexpr (is_exact_v<T>) {
    return sgn(a) == 0;
  } else {
    return std::fabs(a) <= tol;
  }
}

}  // namespace minex
