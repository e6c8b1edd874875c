#pragma once
// Exact rational arithmetic for exponent bookkeeping. Values stay tiny
// (numerators and denominators of Lebesgue exponents), int64 is plenty.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mlr/base.hpp"

namespace mlr {

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n, std::int64_t d = 1) : num_(n), den_(d) {
    require(den_ != 0, "Rational: zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(Rational a, Rational b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(Rational a, Rational b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }
  friend Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }

  // Exact comparisons via 128-bit cross multiplication; denominators are kept positive.
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(Rational a, Rational b) { return !(a == b); }
  friend bool operator<(Rational a, Rational b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(Rational a, Rational b) { return b < a; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend bool operator>=(Rational a, Rational b) { return !(a < b); }

 private:
  void normalize() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (num_ == 0) den_ = 1;
  }
  std::int64_t num_, den_;
};

}  // namespace mlr
