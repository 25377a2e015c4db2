#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cidx {

/// Exact fraction with 64-bit parts, always reduced with a positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  /// Parses "p/q", "p" or a decimal literal with at most 15 fractional digits.
  static Rational parse(std::string_view text);

  /// Continued-fraction approximation; returns the first convergent within tol.
  static Rational approximate(double value, double tol = 1e-9, std::int64_t max_den = 1'000'000'000);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace cidx
