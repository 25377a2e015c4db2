#include "cidx/rational.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "cidx/errors.hpp"

namespace cidx {

namespace {

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw Error(Errc::InvalidArgument, "rational overflow");
  return static_cast<std::int64_t>(v);
}

Rational make(__int128 num, __int128 den) {
  if (den == 0) throw Error(Errc::InvalidArgument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 a = num < 0 ? -num : num;
  __int128 b = den;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(checked(num), checked(den));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(Errc::InvalidArgument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [](std::string_view s) -> std::int64_t {
    if (s.empty()) throw Error(Errc::InvalidArgument, "empty rational component");
    std::string buf(s);
    char* end = nullptr;
    const long long v = std::strtoll(buf.c_str(), &end, 10);
    if (end == nullptr || *end != '\0') throw Error(Errc::InvalidArgument, "bad rational '" + buf + "'");
    return v;
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 15) throw Error(Errc::InvalidArgument, "too many decimal digits");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::string whole(text.substr(0, dot));
    const bool negative = !whole.empty() && whole[0] == '-';
    const std::int64_t ip = whole.empty() || whole == "-" || whole == "+" ? 0 : parse_int(whole);
    const std::int64_t fp = frac.empty() ? 0 : parse_int(frac);
    const std::int64_t mag = std::llabs(ip) * den + fp;
    return Rational(negative ? -mag : mag, den);
  }
  return Rational(parse_int(text));
}

Rational Rational::approximate(double value, double tol, std::int64_t max_den) {
  if (!std::isfinite(value)) throw Error(Errc::InvalidArgument, "cannot rationalize non-finite value");
  // Convergents h_k/k_k of the continued fraction expansion.
  __int128 h_prev = 1, h = static_cast<__int128>(std::floor(value));
  __int128 k_prev = 0, k = 1;
  double frac = value - std::floor(value);
  while (std::abs(static_cast<double>(h) / static_cast<double>(k) - value) > tol) {
    if (frac < 1e-15) break;
    const double inv = 1.0 / frac;
    const auto a = static_cast<__int128>(std::floor(inv));
    frac = inv - std::floor(inv);
    const __int128 h_next = a * h + h_prev;
    const __int128 k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return make(h, k);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
              static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
              static_cast<__int128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

}  // namespace cidx
