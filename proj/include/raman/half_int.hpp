#pragma once

#include <compare>
#include <cstdlib>
#include <string>

namespace raman {

/// Angular-momentum quantum number stored as twice its value, so 3/2 is exact.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr HalfInt(int whole) : twice_(2 * whole) {}  // NOLINT(google-explicit-constructor)

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static constexpr HalfInt half(int numerator) { return from_twice(numerator); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  constexpr HalfInt abs() const { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return from_twice(a.twice_ + b.twice_); }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return from_twice(a.twice_ - b.twice_); }
  friend constexpr bool operator==(HalfInt, HalfInt) = default;
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

  std::string str() const {
    return is_integer() ? std::to_string(twice_ / 2) : std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

/// Integer value of a HalfInt known to be integral.
constexpr int as_int(HalfInt h) { return h.twice() / 2; }

/// True when a and b differ by an integer.
constexpr bool same_parity(HalfInt a, HalfInt b) { return (a.twice() - b.twice()) % 2 == 0; }

}  // namespace raman
