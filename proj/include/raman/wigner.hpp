#pragma once

// Wigner 3j and 6j symbols from the Racah closed-form sums.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "common.hpp"
#include "half_int.hpp"

namespace raman {

namespace detail {

inline constexpr int kMaxFactorial = 80;

inline const std::array<double, kMaxFactorial + 1>& factorial_table() {
  static const auto table = [] {
    std::array<double, kMaxFactorial + 1> t{};
    t[0] = 1.0;
    for (int n = 1; n <= kMaxFactorial; ++n) t[n] = t[n - 1] * n;
    return t;
  }();
  return table;
}

inline double factorial(int n) {
  if (n < 0 || n > kMaxFactorial) {
    throw ValidationError("factorial argument out of table range: " + std::to_string(n));
  }
  return factorial_table()[n];
}

inline bool triangle_ok(HalfInt a, HalfInt b, HalfInt c) {
  if ((a.twice() + b.twice() + c.twice()) % 2 != 0) return false;
  return c >= (a - b).abs() && c <= a + b;
}

// sqrt of (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!
inline double triangle_coefficient(HalfInt a, HalfInt b, HalfInt c) {
  return std::sqrt(factorial(as_int(a + b - c)) * factorial(as_int(a - b + c)) *
                   factorial(as_int(-a + b + c)) / factorial(as_int(a + b + c) + 1));
}

inline void check_nonnegative(HalfInt j, const char* name) {
  if (j.twice() < 0) throw ValidationError(std::string("negative angular momentum ") + name);
}

inline void check_projection(HalfInt j, HalfInt m, const char* name) {
  check_nonnegative(j, name);
  if (!same_parity(j, m)) {
    throw ValidationError(std::string("inconsistent half-integer parity between ") + name +
                          "=" + j.str() + " and its projection " + m.str());
  }
}

inline double sign_of_power(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
///
/// Returns exactly 0 when m1+m2+m3 != 0, when |m_i| > j_i, or when the
/// triangle rule fails. Throws ValidationError if some j_i - m_i is not an
/// integer.
inline double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  detail::check_projection(j1, m1, "j1");
  detail::check_projection(j2, m2, "j2");
  detail::check_projection(j3, m3, "j3");
  if ((m1 + m2 + m3).twice() != 0) return 0.0;
  if (m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3) return 0.0;
  if (!detail::triangle_ok(j1, j2, j3)) return 0.0;

  using detail::factorial;
  const int k_min = std::max({0, as_int(j2 - j3 - m1), as_int(j1 - j3 + m2)});
  const int k_max = std::min({as_int(j1 + j2 - j3), as_int(j1 - m1), as_int(j2 + m2)});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double denom = factorial(k) * factorial(as_int(j3 - j2 + m1) + k) *
                         factorial(as_int(j3 - j1 - m2) + k) * factorial(as_int(j1 + j2 - j3) - k) *
                         factorial(as_int(j1 - m1) - k) * factorial(as_int(j2 + m2) - k);
    sum += detail::sign_of_power(k) / denom;
  }
  const double norm = std::sqrt(factorial(as_int(j1 + m1)) * factorial(as_int(j1 - m1)) *
                                factorial(as_int(j2 + m2)) * factorial(as_int(j2 - m2)) *
                                factorial(as_int(j3 + m3)) * factorial(as_int(j3 - m3)));
  const double phase = detail::sign_of_power(std::abs(as_int(j1 - j2 - m3)));
  return phase * detail::triangle_coefficient(j1, j2, j3) * norm * sum;
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}. Zero when any triad
/// (j1 j2 j3), (j1 j5 j6), (j4 j2 j6), (j4 j5 j3) is not a triangle.
inline double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  detail::check_nonnegative(j1, "j1");
  detail::check_nonnegative(j2, "j2");
  detail::check_nonnegative(j3, "j3");
  detail::check_nonnegative(j4, "j4");
  detail::check_nonnegative(j5, "j5");
  detail::check_nonnegative(j6, "j6");
  using detail::triangle_ok;
  if (!triangle_ok(j1, j2, j3) || !triangle_ok(j1, j5, j6) || !triangle_ok(j4, j2, j6) ||
      !triangle_ok(j4, j5, j3)) {
    return 0.0;
  }

  using detail::factorial;
  const int a1 = as_int(j1 + j2 + j3);
  const int a2 = as_int(j1 + j5 + j6);
  const int a3 = as_int(j4 + j2 + j6);
  const int a4 = as_int(j4 + j5 + j3);
  const int b1 = as_int(j1 + j2 + j4 + j5);
  const int b2 = as_int(j2 + j3 + j5 + j6);
  const int b3 = as_int(j3 + j1 + j6 + j4);
  const int t_min = std::max({a1, a2, a3, a4});
  const int t_max = std::min({b1, b2, b3});
  double sum = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    const double denom = factorial(t - a1) * factorial(t - a2) * factorial(t - a3) *
                         factorial(t - a4) * factorial(b1 - t) * factorial(b2 - t) *
                         factorial(b3 - t);
    sum += detail::sign_of_power(t) * factorial(t + 1) / denom;
  }
  using detail::triangle_coefficient;
  return triangle_coefficient(j1, j2, j3) * triangle_coefficient(j1, j5, j6) *
         triangle_coefficient(j4, j2, j6) * triangle_coefficient(j4, j5, j3) * sum;
}

}  // namespace raman
