#include "gaplab/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace gaplab {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error("Rational: 64-bit overflow");
  return static_cast<std::int64_t>(v);
}

struct ReducedPair {
  std::int64_t num;
  std::int64_t den;
};

ReducedPair reduce128(__int128 n, __int128 d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  return {narrow(n / a), narrow(d / a)};
}

Rational make_reduced(__int128 n, __int128 d) {
  ReducedPair r = reduce128(n, d);
  return Rational(r.num, r.den);
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  ReducedPair r = reduce128(n, d);
  num_ = r.num;
  den_ = r.den;
}

Rational operator+(const Rational& a, const Rational& b) {
  return make_reduced(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                      static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return make_reduced(static_cast<__int128>(a.num_) * b.num_,
                      static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
  return make_reduced(static_cast<__int128>(a.num_) * b.den_,
                      static_cast<__int128>(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace gaplab
