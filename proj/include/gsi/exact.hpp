#pragma once

// Exact integer/rational arithmetic and small dense matrices over them.

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gsi {

using Integer = mpz_class;
using Rational = mpq_class;

using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;
using IntMatrix = std::vector<IntVector>;
using RatMatrix = std::vector<RatVector>;

/// Parses "p", "-p", "p/q" or a finite decimal such as "0.25" into a
/// canonical rational.  Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);
Integer parse_integer(std::string_view text);

/// p / q in canonical form (q != 0).
Rational ratio(const Integer& p, const Integer& q);

/// "p" when the denominator is one, else "p/q".
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

/// Converts a double exactly (every finite double is a dyadic rational).
Rational rational_from_double(double x);
double to_double(const Rational& q);

Integer floor(const Rational& q);
Integer ceil(const Rational& q);
/// q - floor(q), in [0, 1).
Rational frac(const Rational& q);
/// Canonical residue of z modulo m > 0, in [0, m).
Integer mod(const Integer& z, const Integer& m);
Integer gcd(const Integer& a, const Integer& b);
Integer lcm(const Integer& a, const Integer& b);
Rational abs(const Rational& q);
Integer pow(const Integer& base, unsigned long exponent);
Rational pow(const Rational& base, long exponent);

/// The rational square root of q when one exists.
bool exact_sqrt(const Rational& q, Rational& root);

/// Largest power of two (possibly negative exponent) that is <= q, for q > 0.
Rational floor_power_of_two(const Rational& q);

/// Continued-fraction approximation of x with |x - p/q| <= tolerance.
Rational rationalize(double x, double tolerance);

bool is_integer(const Rational& q);

RatMatrix to_rational(const IntMatrix& m);
RatMatrix transpose(const RatMatrix& m);
IntMatrix transpose(const IntMatrix& m);
RatMatrix identity(std::size_t n);
RatMatrix multiply(const RatMatrix& a, const RatMatrix& b);
RatVector row_times(const RatVector& row, const RatMatrix& m);
Rational determinant(RatMatrix m);
Integer determinant(const IntMatrix& m);
/// Throws GsiError(SingularMatrix) when m is not invertible.
RatMatrix inverse(const RatMatrix& m);

/// Least common denominator of all entries.
Integer common_denominator(const RatMatrix& m);

/// Row-style Hermite normal form of an m x n integer matrix of rank n (rows
/// generate the lattice).  The result is n x n, upper triangular with positive
/// diagonal and 0 <= H[i][j] < H[j][j] for i < j.
/// Throws GsiError(SingularMatrix) if the rows do not have full column rank.
IntMatrix hermite_normal_form(IntMatrix rows);

/// Real and imaginary parts as exact rationals.
struct ComplexRational {
  Rational re;
  Rational im;

  friend bool operator==(const ComplexRational&, const ComplexRational&) = default;
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }
};

ComplexRational operator+(const ComplexRational& a, const ComplexRational& b);
ComplexRational operator-(const ComplexRational& a, const ComplexRational& b);
ComplexRational operator*(const ComplexRational& a, const ComplexRational& b);
ComplexRational conj(const ComplexRational& a);

}  // namespace gsi
