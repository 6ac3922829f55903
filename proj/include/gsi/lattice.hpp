#pragma once

// Exact lattice algebra: full-rank subgroups of Z^n, cyclic subgroups dZ_M
// of Z_M, rational lattices in R^n, and finite subgroups of T^n (the
// annihilators of lattices in Z^n).
//
// Bases are stored row-wise: the lattice is { z B : z in Z^n }.  For a
// matrix C in the column convention Gamma = C Z^n the stored basis is C^T.
// Either way the annihilator has basis "inverse transpose".

#include <cstddef>
#include <variant>
#include <vector>

#include "gsi/exact.hpp"
#include "gsi/group_model.hpp"

namespace gsi {

/// Full-rank sublattice of Z^n in row-style Hermite normal form.  Equality of
/// stored bases is equality of lattices.
struct IntLattice {
  IntMatrix basis;

  std::size_t dimension() const { return basis.size(); }
  friend bool operator==(const IntLattice&, const IntLattice&) = default;
};

/// Full-rank lattice with rational basis, kept in the canonical form
/// HNF(D * B) / D for the least common denominator D.
struct RatLattice {
  RatMatrix basis;

  std::size_t dimension() const { return basis.size(); }
  friend bool operator==(const RatLattice&, const RatLattice&) = default;
};

/// dZ_M inside Z_M (or inside its dual group), d | M.
struct CyclicSublattice {
  Integer modulus;
  Integer step;

  friend bool operator==(const CyclicSublattice&, const CyclicSublattice&) = default;
};

/// dZ_M with covolume d.  Throws NotADivisor unless d | M.
CyclicSublattice subgroup_for_divisor(const Integer& modulus, const Integer& divisor);
/// {0, d, 2d, ...} below M.
std::vector<Integer> elements(const CyclicSublattice& lattice);

using LatticeData = std::variant<IntLattice, RatLattice, CyclicSublattice>;

/// A lattice together with the group it lives in.
///   ambient Integer -> IntLattice
///   ambient Torus   -> RatLattice containing Z^n (the subgroup is its image mod Z^n)
///   ambient Real    -> RatLattice
///   ambient Finite  -> CyclicSublattice (single modulus only)
struct Lattice {
  GroupModel ambient;
  LatticeData data;

  friend bool operator==(const Lattice&, const Lattice&) = default;

  static Lattice integer(const IntMatrix& basis);
  static Lattice integer_multiples(const Integer& c);  // cZ
  static Lattice cyclic(const Integer& modulus, const Integer& step, bool dual_side = false);
  static Lattice real(const RatMatrix& basis, bool dual_side = false);
  static Lattice torus(const RatMatrix& basis);

  std::size_t dimension() const { return ambient.dimension; }
  bool contains(const GroupPoint& x) const;
  /// Rows generating the lattice as a subgroup of Q^n (integers for Finite).
  RatMatrix generator_rows() const;
  /// The generator c of a one-dimensional lattice cZ, dZ_M or (1/c)Z mod 1.
  Rational scalar_generator() const;
};

/// Row-style Hermite normal form of a nonsingular square integer matrix.
/// Throws GsiError(SingularMatrix) when det = 0.
IntLattice hnf_canonicalize(const IntMatrix& matrix);

/// Canonical rational basis of the lattice spanned by the given rows.
RatLattice canonicalize_rational(const RatMatrix& rows);

Rational covolume(const IntLattice& lattice);
Rational covolume(const RatLattice& lattice);
Rational covolume(const CyclicSublattice& lattice);
/// Covolume under the ambient Haar measure.
Rational covolume(const Lattice& lattice);

/// The annihilator in the dual group; covolume(L) * covolume(dual) = 1.
Lattice dual_lattice(const Lattice& lattice);

/// Set intersection.  Throws IncompatibleAmbient for different groups.
Lattice intersect(const Lattice& a, const Lattice& b);

/// The lattice a + b (used for coset disjointness).
Lattice lattice_sum(const Lattice& a, const Lattice& b);

struct CosetIndex {
  Integer index;
  std::vector<GroupPoint> representatives;  // lexicographically sorted
};

/// [super : sub] and one representative per coset of sub in super, taken as
/// the nonnegative residues relative to the Hermite form.  Throws
/// NotASublattice, or ModelTooLarge beyond `max_representatives`.
CosetIndex index_and_cosets(const Lattice& sub, const Lattice& super,
                            std::size_t max_representatives = std::size_t{1} << 22);

/// Only the index, without enumerating representatives.
Integer lattice_index(const Lattice& sub, const Lattice& super);

/// True iff the cosets a + A and b + B do not meet.
bool cosets_disjoint(const GroupPoint& a, const Lattice& A, const GroupPoint& b, const Lattice& B);

/// Independence of the annihilators of cZ / dZ_M lattices: pairwise coprime
/// generators.  Throws UnsupportedModel for real or torus lattices.
bool duals_independent(const std::vector<Lattice>& lattices);

/// Every element of a lattice in a compact group, or of a lattice in Z^n /
/// R^n inside the closed box [lo, hi].
std::vector<GroupPoint> lattice_points(const Lattice& lattice);
std::vector<GroupPoint> lattice_points_in_box(const Lattice& lattice, const RatVector& lo, const RatVector& hi);

struct CosetPart {
  GroupPoint shift;
  Lattice sublattice;
};

/// Gamma = disjoint union of shift_i + Lambda_i, possibly truncated to a
/// finite prefix (certified separately on a window).
struct CosetDecomposition {
  Lattice ambient;
  std::vector<CosetPart> parts;
};

}  // namespace gsi
