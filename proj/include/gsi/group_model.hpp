#pragma once

// The concrete locally compact abelian groups supported by the library,
// together with the Haar normalisations that make Plancherel hold:
//
//   Z_M1 x ... x Z_Mk : counting measure on G, mass 1/(M1...Mk) per dual point
//   Z^n               : counting measure on G, Lebesgue measure on T^n = [0,1)^n
//   R^n               : Lebesgue measure on both sides
//
// A dual group is modelled as a GroupModel of its own so that lattices in
// the frequency domain carry the right covolume.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gsi/exact.hpp"

namespace gsi {

enum class GroupKind {
  Finite,   // Z_M1 x ... x Z_Mk, or its dual (is_dual)
  Integer,  // Z^n
  Torus,    // T^n = dual of Z^n, points stored as rationals in [0,1)
  Real,     // R^n, or its dual (is_dual)
};

struct GroupModel {
  GroupKind kind = GroupKind::Finite;
  std::size_t dimension = 1;
  std::vector<Integer> moduli;  // Finite only
  bool is_dual = false;         // Finite / Real: frequency side

  friend bool operator==(const GroupModel&, const GroupModel&) = default;

  static GroupModel finite_abelian(std::vector<Integer> moduli);
  static GroupModel cyclic(const Integer& modulus) { return finite_abelian({modulus}); }
  static GroupModel integers(std::size_t dimension = 1);
  static GroupModel reals(std::size_t dimension);

  /// Order of the group for Finite models.
  Integer order() const;
  /// Haar mass of a single point (Finite), 1 on G and 1/|G| on the dual.
  Rational point_mass() const;
  bool is_discrete() const { return kind == GroupKind::Finite || kind == GroupKind::Integer; }
  bool is_compact() const { return kind == GroupKind::Finite || kind == GroupKind::Torus; }
  /// Total Haar mass; nullopt for infinite measure.
  std::optional<Rational> total_measure() const;
  std::string name() const;
};

GroupModel dual_group(const GroupModel& model);

/// An element of G or of the dual group: integer residues for Finite and
/// Integer, rationals in [0,1) for Torus, rationals for Real.
using GroupPoint = std::vector<Rational>;

/// Reduces a point into the canonical representative for the model.
GroupPoint canonical_point(const GroupModel& model, GroupPoint point);

/// <x, omega> = exp(2 pi i sum x_i omega_i / M_i) on finite groups and
/// exp(2 pi i <x, omega>) on Z^n and R^n.  `model` is the group of x.
std::complex<double> character_value(const GroupModel& model, const GroupPoint& x, const GroupPoint& omega);

/// The phase (in turns, modulo 1) of character_value, exact.
Rational character_phase(const GroupModel& model, const GroupPoint& x, const GroupPoint& omega);

}  // namespace gsi
