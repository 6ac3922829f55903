#pragma once

// Functions on a dual group that are, on each cell of a finite partition
// into rational boxes, a finite exponential sum
//
//   F(omega) = sum_kappa c_kappa * exp(-2 pi i <kappa, omega>).
//
// Three domains share the representation:
//   T       period 1, Lebesgue measure
//   R^n     no period, Lebesgue measure
//   dual of Z_M: period M, functions constant on the unit cells [k, k+1),
//           each cell carrying mass 1/M (so integrals are (1/M) * sum).

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "gsi/geometry.hpp"
#include "gsi/group_model.hpp"
#include "gsi/scalar.hpp"

namespace gsi {

struct SpectralDomain {
  std::size_t dimension = 1;
  std::optional<Rational> period;
  Rational density{1};
  bool discrete = false;

  friend bool operator==(const SpectralDomain&, const SpectralDomain&) = default;

  /// The domain representing the dual of `model` (model is the time side).
  static SpectralDomain dual_of(const GroupModel& model);
  /// The whole fundamental domain [0, period) when periodic.
  std::optional<Box> fundamental_box() const;
  /// Haar measure of a box (density * Lebesgue).
  Rational measure(const Box& box) const { return density * volume(box); }
};

using TermMap = std::map<RatVector, Scalar>;

struct Piece {
  Box box;
  TermMap terms;
};

class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(SpectralDomain domain) : domain_(std::move(domain)) {}

  /// Piecewise constant values on disjoint boxes.
  static Spectrum piecewise_constant(SpectralDomain domain, const std::vector<std::pair<Box, Scalar>>& values);
  /// Values on the points 0..M-1 of the dual of Z_M.
  static Spectrum from_values(SpectralDomain domain, const std::vector<Scalar>& values);
  /// A single exponential sum over the whole fundamental domain (periodic domains).
  static Spectrum trigonometric(SpectralDomain domain, const TermMap& terms);

  const SpectralDomain& domain() const { return domain_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  /// Appends a piece; boxes must stay disjoint and inside the fundamental domain.
  void add_piece(Box box, TermMap terms);

  Scalar at(const RatVector& omega) const;
  std::complex<double> value(const RatVector& omega) const { return at(omega).value(); }

  Spectrum conj() const;
  Spectrum scaled(const Scalar& c) const;
  /// omega -> F(omega + alpha).
  Spectrum shifted(const RatVector& alpha) const;
  /// Multiplication by exp(-2 pi i <x, omega>) (the spectrum of a translate).
  Spectrum modulated(const RatVector& x) const;
  friend Spectrum operator*(const Spectrum& a, const Spectrum& b);

  /// Pointwise sum on the common refinement of all pieces.
  static Spectrum sum(const std::vector<Spectrum>& parts, SpectralDomain domain);

  /// Integral against the Haar measure of the domain.
  Scalar integral() const;
  /// Integral of |F|; exact on cells holding a single exponential, numerical
  /// quadrature elsewhere.
  Scalar integral_abs() const;
  /// sup |F| bound: max over cells of sum |c|.
  double sup_bound() const;

  /// Boxes on which some coefficient is not an exact zero.
  BoxSet support() const;
  /// Drops exact-zero terms and empty pieces, and merges adjacent equal
  /// cells in one dimension.
  Spectrum simplified() const;

 private:
  SpectralDomain domain_;
  std::vector<Piece> pieces_;
};

/// Integral over a box of exp(-2 pi i <kappa, omega>) (Lebesgue measure).
Scalar exponential_integral(const Box& box, const RatVector& kappa);

}  // namespace gsi
