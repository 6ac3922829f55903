#include "gsi/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "gsi/error.hpp"

namespace gsi {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::IncompatibleAmbient: return "IncompatibleAmbient";
    case ErrorCode::EmptyIntersectionRank: return "EmptyIntersectionRank";
    case ErrorCode::NotASublattice: return "NotASublattice";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::NotADivisor: return "NotADivisor";
    case ErrorCode::FrequencyNotInDualLattice: return "FrequencyNotInDualLattice";
    case ErrorCode::FrequencyNotInAnyDualLattice: return "FrequencyNotInAnyDualLattice";
    case ErrorCode::NonEvaluable: return "NonEvaluable";
    case ErrorCode::TargetUnknown: return "TargetUnknown";
    case ErrorCode::TilingViolation: return "TilingViolation";
    case ErrorCode::InsufficientVolume: return "InsufficientVolume";
    case ErrorCode::ConditionExceeded: return "ConditionExceeded";
    case ErrorCode::ChainNotStrict: return "ChainNotStrict";
    case ErrorCode::NotFiniteIndex: return "NotFiniteIndex";
    case ErrorCode::NotARefinement: return "NotARefinement";
    case ErrorCode::ModelTooLarge: return "ModelTooLarge";
    case ErrorCode::UCPUnknown: return "UCPUnknown";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Integer parse_integer(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw std::invalid_argument("not an integer: " + std::string(text));
  std::string s(text);
  if (s.front() == '+') s.erase(0, 1);
  return Integer(s, 10);
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(text.substr(0, slash));
    std::string_view den = text.substr(slash + 1);
    if (!all_digits(den)) throw std::invalid_argument("bad denominator: " + std::string(text));
    Integer q(std::string(den), 10);
    if (q == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view decimals = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if ((!whole.empty() && !all_digits(whole)) || (!decimals.empty() && !all_digits(decimals)) ||
        (whole.empty() && decimals.empty()))
      throw std::invalid_argument("bad decimal: " + std::string(text));
    Integer numerator(std::string(whole.empty() ? "0" : whole) + std::string(decimals), 10);
    Rational r(numerator, pow(Integer(10), decimals.size()));
    r.canonicalize();
    return negative ? Rational(-r) : r;
  }
  return Rational(parse_integer(text));
}

Rational ratio(const Integer& p, const Integer& q) {
  if (q == 0) throw std::invalid_argument("zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Integer& z) { return z.get_str(10); }

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str(10);
  return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite double");
  return Rational(x);
}

double to_double(const Rational& q) { return q.get_d(); }

Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational frac(const Rational& q) { return q - Rational(floor(q)); }

Integer mod(const Integer& z, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer gcd(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Integer pow(const Integer& base, unsigned long exponent) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

Rational pow(const Rational& base, long exponent) {
  if (exponent >= 0) {
    Rational r(pow(base.get_num(), static_cast<unsigned long>(exponent)),
               pow(base.get_den(), static_cast<unsigned long>(exponent)));
    r.canonicalize();
    return r;
  }
  if (base == 0) throw std::domain_error("zero to a negative power");
  return Rational(1) / pow(base, -exponent);
}

bool exact_sqrt(const Rational& q, Rational& root) {
  if (q < 0) return false;
  if (mpz_perfect_square_p(q.get_num_mpz_t()) == 0 || mpz_perfect_square_p(q.get_den_mpz_t()) == 0)
    return false;
  Integer n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  root = Rational(n, d);
  root.canonicalize();
  return true;
}

Rational floor_power_of_two(const Rational& q) {
  if (q <= 0) throw std::domain_error("floor_power_of_two of non-positive value");
  Rational p(1);
  while (p > q) p /= 2;
  while (p * 2 <= q) p *= 2;
  return p;
}

Rational rationalize(double x, double tolerance) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize of non-finite value");
  // Convergents h/k of the continued fraction expansion.
  Integer h_prev = 1, h = static_cast<long>(std::floor(x));
  Integer k_prev = 0, k = 1;
  double rem = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    Rational current(h, k);
    if (std::fabs(to_double(current) - x) <= tolerance || rem < 1e-300) {
      current.canonicalize();
      return current;
    }
    double inv = 1.0 / rem;
    double a = std::floor(inv);
    rem = inv - a;
    Integer ai = static_cast<long>(a);
    Integer h_next = ai * h + h_prev;
    Integer k_next = ai * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  Rational r(h, k);
  r.canonicalize();
  return r;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) r[i].assign(m[i].begin(), m[i].end());
  return r;
}

RatMatrix transpose(const RatMatrix& m) {
  if (m.empty()) return {};
  RatMatrix t(m[0].size(), RatVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

IntMatrix transpose(const IntMatrix& m) {
  if (m.empty()) return {};
  IntMatrix t(m[0].size(), IntVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

RatMatrix identity(std::size_t n) {
  RatMatrix id(n, RatVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

RatMatrix multiply(const RatMatrix& a, const RatMatrix& b) {
  if (a.empty() || b.empty()) return {};
  RatMatrix c(a.size(), RatVector(b[0].size(), Rational(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

RatVector row_times(const RatVector& row, const RatMatrix& m) {
  if (m.empty()) return {};
  RatVector out(m[0].size(), Rational(0));
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] == 0) continue;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[k] * m[k][j];
  }
  return out;
}

Rational determinant(RatMatrix m) {
  const std::size_t n = m.size();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && m[pivot][c] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      Rational factor = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= factor * m[c][k];
    }
  }
  return det;
}

Integer determinant(const IntMatrix& m) {
  Rational d = determinant(to_rational(m));
  return d.get_num();
}

RatMatrix inverse(const RatMatrix& m) {
  const std::size_t n = m.size();
  RatMatrix a = m;
  RatMatrix inv = identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && a[pivot][c] == 0) ++pivot;
    if (pivot == n) throw GsiError(ErrorCode::SingularMatrix, "matrix is not invertible");
    std::swap(a[pivot], a[c]);
    std::swap(inv[pivot], inv[c]);
    Rational p = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= p;
      inv[c][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational factor = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= factor * a[c][k];
        inv[r][k] -= factor * inv[c][k];
      }
    }
  }
  return inv;
}

Integer common_denominator(const RatMatrix& m) {
  Integer d(1);
  for (const auto& row : m)
    for (const auto& q : row) d = lcm(d, q.get_den());
  return d;
}

IntMatrix hermite_normal_form(IntMatrix rows) {
  if (rows.empty()) throw GsiError(ErrorCode::SingularMatrix, "empty matrix");
  const std::size_t n = rows[0].size();
  const std::size_t m = rows.size();
  std::size_t r = 0;  // next pivot row
  for (std::size_t col = 0; col < n && r < m; ++col) {
    // Euclid on column entries below r until a single nonzero remains.
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = r; i < m; ++i)
        if (rows[i][col] != 0 && (best == m || ::abs(rows[i][col]) < ::abs(rows[best][col]))) best = i;
      if (best == m) break;
      std::swap(rows[r], rows[best]);
      bool reduced = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (rows[i][col] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(), rows[r][col].get_mpz_t());
        for (std::size_t k = col; k < n; ++k) rows[i][k] -= q * rows[r][k];
        if (rows[i][col] != 0) reduced = false;
      }
      if (reduced) break;
    }
    if (rows[r][col] == 0) throw GsiError(ErrorCode::SingularMatrix, "rows do not span full rank");
    if (rows[r][col] < 0)
      for (std::size_t k = col; k < n; ++k) rows[r][k] = -rows[r][k];
    ++r;
  }
  if (r < n) throw GsiError(ErrorCode::SingularMatrix, "rows do not span full rank");
  rows.resize(n);
  // Reduce entries above each pivot into [0, pivot).
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t i = 0; i < col; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(), rows[col][col].get_mpz_t());
      if (q == 0) continue;
      for (std::size_t k = col; k < n; ++k) rows[i][k] -= q * rows[col][k];
    }
  }
  return rows;
}

ComplexRational operator+(const ComplexRational& a, const ComplexRational& b) {
  return {a.re + b.re, a.im + b.im};
}

ComplexRational operator-(const ComplexRational& a, const ComplexRational& b) {
  return {a.re - b.re, a.im - b.im};
}

ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexRational conj(const ComplexRational& a) { return {a.re, -a.im}; }

}  // namespace gsi
