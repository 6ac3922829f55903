#pragma once

// Constructions: Shannon-type generators from frequency tilings, cube
// coverings, near-isotropic tiles, subgroup-chain coset decompositions,
// small-bandwidth orthonormal bases and the Bownik-Rzeszotnik partition.
//
// Frequency sets are BoxSets in the coordinates of the spectral domain;
// on the dual of Z_M the point k is the unit cell [k, k+1).

#include <optional>
#include <vector>

#include "gsi/analysis.hpp"
#include "gsi/geometry.hpp"
#include "gsi/system.hpp"

namespace gsi {

/// K_j for each layer j.
struct FrequencyTiling {
  std::vector<BoxSet> tiles;
};

/// Points of the dual of Z_M as unit cells.
BoxSet point_set(const std::vector<long>& points);

/// K_j minus the union of all earlier tiles.
FrequencyTiling disjointify_tiles(const FrequencyTiling& tiling);

struct ShannonOptions {
  /// Coverage region on R^n (compact duals always use the whole group).
  std::optional<Box> region;
};

/// g_j^ = covol(Gamma_j)^{1/2} 1_{K_j minus earlier tiles}.  Throws
/// TilingViolation naming the layer and gamma, or an uncovered cell.
GsiSystem shannon_generators(const GroupModel& model, const std::vector<Lattice>& lattices,
                             const FrequencyTiling& tiling, const ShannonOptions& options = {});

struct CubeCover {
  std::vector<Rational> sides;
  std::vector<Rational> rounded;                  // largest power of two <= side
  std::vector<std::optional<RatVector>> shifts;   // unused cubes have none
  Box target;
  bool covered = false;
  Rational remainder_volume{0};
};

/// Greedy dyadic covering of `target` by cubes tau_j + k_j [0,1)^n.  The
/// certificate subtracts every placed cube (with its original side) from the
/// target exactly.  Throws InsufficientVolume.
CubeCover cube_cover(const std::vector<Rational>& sides, const Box& target);

struct NearIsoTile {
  Rational sigma_min_lower;  // certified: sigma_min(C^{-T}) >= this
  double sigma_min = 0;
  double sigma_max = 0;
  Box cube;                  // (s / (4 n^2)) [-1/2, 1/2)^n
  bool inclusion_certified = false;
};

/// One cube per matrix inside C_j^{-T}(-1/2, 1/2)^n.  Matrices act on
/// column vectors (Gamma_j = C_j Z^n).  Throws ConditionExceeded when
/// sigma_max / sigma_min > bound.
std::vector<NearIsoTile> near_iso_tiles(const std::vector<RatMatrix>& matrices, const Rational& bound);

/// 0, 1, -1, 2, -2, ... for Z; shells of growing max-norm in Z^n
/// (lexicographic by this order inside a shell); residues of Z_M folded the
/// same way.  Returns the first `count` elements of the lattice `h`.
std::vector<GroupPoint> spiral_enumeration(const Lattice& h, std::size_t count);

/// gamma_j for the strictly decreasing chain H_1 > H_2 > ... of finite-index
/// subgroups of H: gamma_1 = 0 and gamma_{j+1} is the earliest enumerated
/// element of H outside every gamma_l + H_l, l <= j.  Throws ChainNotStrict,
/// NotASublattice or NotFiniteIndex.
CosetDecomposition coset_refinement(const Lattice& h, const std::vector<Lattice>& chain);

struct SmallBandwidthOnb {
  GsiSystem system;
  std::vector<CosetDecomposition> refinements;  // one per alpha in Gamma_0^perp
  Rational chain_bandwidth{0};                  // sum over the chain prefix
  Rational system_bandwidth{0};                 // emitted layers
  Rational bound{0};                            // 1 / covol(Gamma_0)
  bool disjoint = false;
  std::optional<Integer> window;                // Z: coverage window checked
  bool covered = false;
  std::vector<GroupPoint> uncovered;
};

/// Orthonormal basis over a refinement of the constant system (Gamma_0)
/// indexed by Gamma_0^perp, using the chain round-robin over alpha.  On
/// finite groups every alpha-chain is completed by the remaining cosets of
/// its last lattice; on Z coverage is checked on [-window, window].
SmallBandwidthOnb small_bandwidth_onb(const Lattice& base, const std::vector<Lattice>& chain,
                                      const std::optional<Integer>& window = std::nullopt);

struct BrPartition {
  long n = 2;
  std::vector<Integer> taus;
  bool disjoint = false;
  std::optional<std::pair<Integer, Integer>> disjoint_witness;  // (i, j), 1-based
  Integer window{0};
  bool covered = false;
  std::vector<Integer> uncovered;
  /// For N = 2: -(1/3)(-2)^j + 1/3 for j = 1..m-1 and whether it equals tau_{j+1}.
  std::vector<std::pair<Integer, bool>> closed_form;
};

/// tau_1 = 0; tau_j the smallest |t| (positive on ties) with t + N^j Z
/// disjoint from the earlier cosets.  `window` defaults to 2^(m-2) for N = 2
/// and to the largest fully covered symmetric window (capped) otherwise.
BrPartition br_partition(long n, std::size_t count, const std::optional<Integer>& window = std::nullopt);

/// Layers N^j Z with g_j = delta_{tau_j}, j = 1..m, plus the geometric tail.
GsiSystem br_system(long n, std::size_t count);

/// h_i = T_{gamma_i} g_j for the parts of the decomposition of layer j.
/// `decompositions[j]` refines layer j.  Throws NotARefinement with an
/// uncovered or doubly covered element.
GsiSystem build_refined_system(const GsiSystem& system, const std::vector<CosetDecomposition>& decompositions);

}  // namespace gsi
