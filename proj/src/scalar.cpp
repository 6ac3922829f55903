#include "gsi/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace gsi {

Scalar Scalar::sqrt_of(const Rational& q) {
  Rational root;
  if (exact_sqrt(q, root)) return Scalar(root);
  Scalar s(std::complex<double>(std::sqrt(to_double(q)), 0.0));
  s.square_ = q;
  return s;
}

std::optional<Rational> Scalar::exact_real() const {
  if (exact_ && exact_->im == 0) return exact_->re;
  return std::nullopt;
}

Scalar Scalar::norm_sq() const {
  if (exact_) return Scalar(exact_->re * exact_->re + exact_->im * exact_->im);
  if (square_) return Scalar(*square_);
  return Scalar(std::complex<double>(std::norm(approx_), 0.0));
}

Scalar Scalar::conj() const {
  Scalar s = *this;
  s.approx_ = std::conj(approx_);
  if (exact_) s.exact_ = gsi::conj(*exact_);
  return s;
}

Scalar Scalar::operator-() const {
  Scalar s;
  s.approx_ = -approx_;
  if (exact_) {
    s.exact_ = ComplexRational{-exact_->re, -exact_->im};
  } else {
    s.exact_.reset();
  }
  return s;
}

Scalar Scalar::modulus() const {
  if (exact_) return sqrt_of(exact_->re * exact_->re + exact_->im * exact_->im);
  if (square_) return *this;
  return Scalar(std::complex<double>(std::abs(approx_), 0.0));
}

bool identical(const Scalar& a, const Scalar& b) {
  if (a.exact_ || b.exact_) return a.exact_ == b.exact_;
  if (a.square_ || b.square_) return a.square_ == b.square_;
  return a.approx_ == b.approx_;
}

Scalar& Scalar::operator+=(const Scalar& other) {
  approx_ += other.approx_;
  if (exact_ && other.exact_) {
    exact_ = *exact_ + *other.exact_;
    square_.reset();
    return *this;
  }
  if (is_exact_zero()) {
    exact_ = other.exact_;
    square_ = other.square_;
    approx_ = other.approx_;
    return *this;
  }
  if (other.is_exact_zero()) return *this;
  if (square_ && other.square_ && *square_ == *other.square_) {
    square_ = Rational(4) * *square_;
    return *this;
  }
  exact_.reset();
  square_.reset();
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& other) {
  Scalar negated = other;
  negated.approx_ = -other.approx_;
  if (other.exact_) negated.exact_ = ComplexRational{-other.exact_->re, -other.exact_->im};
  negated.square_.reset();
  return *this += negated;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_exact_zero() || b.is_exact_zero()) return Scalar(Rational(0));
  if (a.exact_ && b.exact_) return Scalar(*a.exact_ * *b.exact_);
  std::complex<double> approx = a.approx_ * b.approx_;
  // sqrt(p) * sqrt(q), or r * sqrt(q) with r >= 0 rational.
  auto square_of = [](const Scalar& s) -> std::optional<Rational> {
    if (s.square_) return s.square_;
    if (s.exact_ && s.exact_->im == 0 && s.exact_->re >= 0) return s.exact_->re * s.exact_->re;
    return std::nullopt;
  };
  auto sa = square_of(a);
  auto sb = square_of(b);
  if (sa && sb) return Scalar::sqrt_of(*sa * *sb);
  return Scalar(approx);
}

Scalar Scalar::rotate(const Rational& turns) const {
  Rational t = frac(turns);
  Rational quarters = t * 4;
  if (exact_ && quarters.get_den() == 1) {
    ComplexRational unit{0, 0};
    long quarter = quarters.get_num().get_si();
    switch (quarter) {
      case 0: unit = {1, 0}; break;
      case 1: unit = {0, 1}; break;
      case 2: unit = {-1, 0}; break;
      default: unit = {0, -1}; break;
    }
    return Scalar(*exact_ * unit);
  }
  if (square_ && t == 0) return *this;
  double angle = 2.0 * std::numbers::pi * to_double(t);
  return Scalar(approx_ * std::complex<double>(std::cos(angle), std::sin(angle)));
}

std::string Scalar::to_string() const {
  if (exact_) {
    if (exact_->im == 0) return gsi::to_string(exact_->re);
    return gsi::to_string(exact_->re) + (exact_->im < 0 ? "" : "+") + gsi::to_string(exact_->im) + "i";
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", approx_.real(), approx_.imag());
  return buf;
}

}  // namespace gsi
