#pragma once

#include <cmath>
#include <string>

#include "sadic/core.hpp"

namespace sadic {

/// Reduced fraction p/q taken modulo 1, representing the angle t = p/q of the
/// root of unity e^{2 pi i t}. All arithmetic is exact; no floating point is
/// used inside verdicts.
class RationalAngle {
 public:
  RationalAngle() : num_(0), den_(1) {}
  RationalAngle(BigInt p, BigInt q) {
    if (q <= 0) throw std::invalid_argument("angle denominator must be positive");
    BigInt g = boost::multiprecision::gcd(p < 0 ? BigInt(-p) : p, q);
    if (g > 1) { p /= g; q /= g; }
    p %= q;
    if (p < 0) p += q;
    num_ = p;
    den_ = q;
  }

  static RationalAngle zero() { return RationalAngle(); }
  static RationalAngle parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return RationalAngle(BigInt(s), 1);
    return RationalAngle(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  /// Order of e^{2 pi i p/q} as a root of unity.
  const BigInt& order() const { return den_; }

  RationalAngle operator+(const RationalAngle& o) const {
    return RationalAngle(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  RationalAngle operator-(const RationalAngle& o) const {
    return RationalAngle(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  RationalAngle operator-() const { return RationalAngle(-num_, den_); }
  RationalAngle operator*(const BigInt& k) const { return RationalAngle(num_ * k, den_); }

  bool operator==(const RationalAngle& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RationalAngle& o) const { return !(*this == o); }
  bool operator<(const RationalAngle& o) const {
    return num_ * o.den_ < o.num_ * den_;
  }

  double to_double() const {
    return BigRat(num_, den_).convert_to<double>();
  }

  std::string str() const {
    if (num_ == 0) return "0";
    return num_.str() + "/" + den_.str();
  }

 private:
  BigInt num_, den_;  // reduced, 0 <= num < den
};

/// Distance from t to the nearest integer, as an exact fraction in [0, 1/2].
inline BigRat integer_distance(const RationalAngle& t) {
  BigRat x(t.numerator(), t.denominator());
  BigRat half(1, 2);
  return x <= half ? x : BigRat(1) - x;
}

/// |e^{2 pi i t} - e^{2 pi i s}| computed in double precision.
inline double chord_distance(const RationalAngle& t, const RationalAngle& s) {
  RationalAngle d = t - s;
  if (d.is_zero()) return 0.0;
  return 2.0 * std::abs(std::sin(M_PI * d.to_double()));
}

}  // namespace sadic
