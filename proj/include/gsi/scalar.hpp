#pragma once

// Complex scalar that carries an exact value alongside its floating
// approximation whenever the exact value is known.

#include <complex>
#include <optional>
#include <string>

#include "gsi/exact.hpp"

namespace gsi {

class Scalar {
 public:
  Scalar() : approx_(0.0, 0.0), exact_(ComplexRational{0, 0}) {}
  explicit Scalar(std::complex<double> approx) : approx_(approx) {}
  explicit Scalar(const Rational& q) : approx_(to_double(q), 0.0), exact_(ComplexRational{q, 0}) {}
  explicit Scalar(const ComplexRational& z) : approx_(z.to_complex()), exact_(z) {}

  /// The nonnegative real sqrt(q); exact when q is a rational square,
  /// otherwise the square is remembered so products can recover exactness.
  static Scalar sqrt_of(const Rational& q);

  const std::complex<double>& value() const { return approx_; }
  const std::optional<ComplexRational>& exact() const { return exact_; }
  /// Set when the value equals sqrt(square()) (real, nonnegative).
  const std::optional<Rational>& square() const { return square_; }

  bool is_exact() const { return exact_.has_value(); }
  bool is_exact_zero() const { return exact_ && exact_->re == 0 && exact_->im == 0; }
  /// Exact real part, if the value is exact and real.
  std::optional<Rational> exact_real() const;
  /// |z|^2, exact when possible.
  Scalar norm_sq() const;

  Scalar conj() const;
  Scalar operator-() const;
  double abs() const { return std::abs(approx_); }
  /// |z| as a Scalar, exact (or square-tracked) when z is exact.
  Scalar modulus() const;
  Scalar& operator+=(const Scalar& other);
  Scalar& operator-=(const Scalar& other);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Rational& q, const Scalar& b) { return Scalar(q) * b; }

  /// Multiplies by exp(2 pi i t) for rational t; exact for t in (1/4)Z.
  Scalar rotate(const Rational& turns) const;

  /// Distance |a - b| using the approximations.
  friend double distance(const Scalar& a, const Scalar& b) { return std::abs(a.approx_ - b.approx_); }

  /// Same exact value, same square root, or bitwise-equal approximations.
  friend bool identical(const Scalar& a, const Scalar& b);

  std::string to_string() const;

 private:
  std::complex<double> approx_;
  std::optional<ComplexRational> exact_;
  std::optional<Rational> square_;
};

}  // namespace gsi
