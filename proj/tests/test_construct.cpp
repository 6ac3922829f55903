#include <set>
#include <random>

#include "doctest.h"
#include "gsi/analysis.hpp"
#include "gsi/construct.hpp"
#include "gsi/error.hpp"
#include "oracles.hpp"

using namespace gsi;

namespace {

Rational q(long a, long b) { return ratio(a, b); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const GsiError& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidInput;
}

oracle::Mat system_operator(const GsiSystem& s) {
  long m = s.model.moduli[0].get_si();
  std::vector<oracle::Layer> layers;
  for (std::size_t j = 0; j < s.layers.size(); ++j) {
    auto g = time_values(s.layers[j].g, s.model);
    auto h = time_values(s.synthesis(j), s.model);
    layers.push_back({s.layers[j].lattice.scalar_generator().get_num().get_si(), g, h});
  }
  return oracle::frame_operator(m, layers);
}

double max_difference(const oracle::Mat& a, const oracle::Mat& b) {
  double worst = 0;
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(a[r][c] - b[r][c]));
  return worst;
}

// Brute force: scan 0, 1, -1, 2, ... for a t outside every earlier t_i + N^i Z.
std::vector<long> greedy_oracle(long n, int m) {
  std::vector<long> taus;
  for (int j = 1; j <= m; ++j) {
    for (long s = 0;; ++s) {
      long t = s % 2 ? (s + 1) / 2 : -s / 2;
      bool ok = true;
      long modulus = 1;
      for (std::size_t i = 0; i < taus.size(); ++i) {
        modulus *= n;
        if (((t - taus[i]) % modulus + modulus) % modulus == 0) ok = false;
      }
      if (ok) {
        taus.push_back(t);
        break;
      }
    }
  }
  return taus;
}

std::vector<long> as_longs(const std::vector<Integer>& v) {
  std::vector<long> out;
  for (const auto& x : v) out.push_back(x.get_si());
  return out;
}

std::vector<long> shifts_of(const CosetDecomposition& d) {
  std::vector<long> out;
  for (const auto& p : d.parts) out.push_back(p.shift[0].get_num().get_si());
  return out;
}

}  // namespace

TEST_CASE("disjointify tiles") {
  FrequencyTiling t{{point_set({0, 1, 2, 3}), point_set({3, 4, 5, 6, 7})}};
  FrequencyTiling d = disjointify_tiles(t);
  CHECK(volume(d.tiles[0]) == 4);
  CHECK(volume(d.tiles[1]) == 4);
  CHECK(volume(intersection(d.tiles[1], point_set({4, 5, 6, 7}))) == 4);

  FrequencyTiling already{{point_set({0, 1}), point_set({2, 3})}};
  auto same = disjointify_tiles(already);
  CHECK(volume(intersection(same.tiles[1], point_set({2, 3}))) == 2);

  FrequencyTiling torus{{BoxSet{{Box{Interval{Rational(0), q(1, 2)}}}}, BoxSet{{Box{Interval{q(1, 4), Rational(1)}}}}}};
  auto dt = disjointify_tiles(torus);
  REQUIRE(dt.tiles[1].boxes.size() == 1);
  CHECK(dt.tiles[1].boxes[0][0] == Interval{q(1, 2), Rational(1)});
}

TEST_CASE("Shannon generators on Z_8 and Z_12") {
  GroupModel z8 = GroupModel::cyclic(8);
  GsiSystem s = shannon_generators(z8, {Lattice::cyclic(8, 2), Lattice::cyclic(8, 2)},
                                   FrequencyTiling{{point_set({0, 1, 2, 3}), point_set({4, 5, 6, 7})}});
  CHECK(s.claims.onb);
  CHECK(oracle::distance_to_identity(system_operator(s)) < 1e-12);
  // Orthonormality of the 8 translates.
  std::vector<oracle::Vec> vectors;
  for (const auto& layer : s.layers)
    for (long g = 0; g < 8; g += 2) vectors.push_back(oracle::shift(time_values(layer.g, z8), g));
  for (std::size_t a = 0; a < vectors.size(); ++a)
    for (std::size_t b = 0; b < vectors.size(); ++b)
      CHECK(std::abs(oracle::inner(vectors[a], vectors[b]) - (a == b ? 1.0 : 0.0)) < 1e-12);

  GroupModel z12 = GroupModel::cyclic(12);
  GsiSystem p = shannon_generators(
      z12, {Lattice::cyclic(12, 3), Lattice::cyclic(12, 3), Lattice::cyclic(12, 4), Lattice::cyclic(12, 4)},
      FrequencyTiling{{point_set({0, 1, 2, 3}), point_set({4, 5, 6, 7}), point_set({8, 9, 10}), point_set({11})}});
  CHECK_FALSE(p.claims.onb);
  CHECK(p.claims.parseval);
  CHECK(oracle::distance_to_identity(system_operator(p)) < 1e-12);

  // Overlapping tiles: Parseval through the disjointified tiles.
  GsiSystem o = shannon_generators(z8, {Lattice::cyclic(8, 2), Lattice::cyclic(8, 2), Lattice::cyclic(8, 2)},
                                   FrequencyTiling{{point_set({0, 1, 2, 3}), point_set({3, 4, 5, 6}), point_set({6, 7})}});
  CHECK_FALSE(o.claims.onb);
  CHECK(oracle::distance_to_identity(system_operator(o)) < 1e-12);
}

TEST_CASE("Shannon tiling violations") {
  GroupModel z8 = GroupModel::cyclic(8);
  try {
    shannon_generators(z8, {Lattice::cyclic(8, 2)}, FrequencyTiling{{point_set({0, 4})}});
    FAIL("expected TilingViolation");
  } catch (const GsiError& e) {
    CHECK(e.code() == ErrorCode::TilingViolation);
    CHECK(std::string(e.what()).find("gamma=(4)") != std::string::npos);
  }
  CHECK(code_of([&] {
          shannon_generators(z8, {Lattice::cyclic(8, 2)}, FrequencyTiling{{point_set({0, 1, 2})}});
        }) == ErrorCode::TilingViolation);
}

TEST_CASE("Shannon generators on T satisfy t_alpha = delta") {
  GroupModel z = GroupModel::integers();
  FrequencyTiling tiling{{BoxSet{{Box{Interval{Rational(0), q(1, 2)}}}}, BoxSet{{Box{Interval{q(1, 2), q(5, 6)}}}},
                          BoxSet{{Box{Interval{q(5, 6), Rational(1)}}}}}};
  GsiSystem s = shannon_generators(
      z, {Lattice::integer_multiples(2), Lattice::integer_multiples(3), Lattice::integer_multiples(5)}, tiling);
  CHECK_FALSE(s.claims.onb);
  for (auto w : {q(0, 1), q(1, 7), q(1, 2), q(2, 3), q(9, 10)}) CHECK(*calderon_sum(s, {w}).exact_real() == 1);
  auto spectra = prepare(s);
  for (const auto& alpha : relevant_alphas(s, spectra)) {
    auto t = t_alpha(s, spectra, alpha);
    for (auto w : {q(1, 11), q(3, 5), q(7, 8)}) {
      auto v = t.values.at({w});
      CHECK(v.exact_real());
      CHECK(*v.exact_real() == (alpha[0] == 0 ? 1 : 0));
    }
  }
}

TEST_CASE("cube covers") {
  Box unit2{Interval{Rational(0), Rational(1)}, Interval{Rational(0), Rational(1)}};
  auto four = cube_cover({q(1, 2), q(1, 2), q(1, 2), q(1, 2)}, unit2);
  CHECK(four.covered);
  CHECK(four.remainder_volume == 0);
  std::set<RatVector> corners;
  for (const auto& s : four.shifts) corners.insert(*s);
  CHECK(corners.size() == 4);

  Box unit1{Interval{Rational(0), Rational(1)}};
  auto one = cube_cover({q(1, 2), q(1, 4), q(1, 4), q(1, 8), q(1, 8)}, unit1);
  CHECK(one.covered);
  std::mt19937 rng(11);
  for (int probe = 0; probe < 500; ++probe) {
    Rational x = q(static_cast<long>(rng() % 100000), 100000);
    bool hit = false;
    for (std::size_t j = 0; j < one.sides.size(); ++j)
      if (one.shifts[j] && (*one.shifts[j])[0] <= x && x < (*one.shifts[j])[0] + one.sides[j]) hit = true;
    CHECK(hit);
  }
  // Non-dyadic sides are rounded down for placement but certified with their true length.
  auto odd = cube_cover({q(3, 5), q(3, 5)}, unit1);
  CHECK(odd.rounded[0] == q(1, 2));
  CHECK(odd.covered);

  CHECK(code_of([&] { cube_cover({q(1, 4)}, unit1); }) == ErrorCode::InsufficientVolume);
}

TEST_CASE("near-isotropic tiles") {
  for (int j = 0; j < 4; ++j) {
    Rational c = pow(Rational(2), -j);
    auto tiles = near_iso_tiles({{{c, Rational(0)}, {Rational(0), c}}}, Rational(2));
    REQUIRE(tiles.size() == 1);
    CHECK(tiles[0].sigma_min_lower == pow(Rational(2), j));
    CHECK(tiles[0].inclusion_certified);
    CHECK(volume(Box{tiles[0].cube[0]}) == pow(Rational(2), j) / 16);
    // Vertex oracle in floating point: C^T v in (-1/2, 1/2)^2.
    double half = to_double(tiles[0].cube[0].hi);
    CHECK(to_double(c) * half < 0.5);
  }
  auto id = near_iso_tiles({{{Rational(1)}}}, Rational(1));
  CHECK(volume(id[0].cube) == q(1, 4));

  std::vector<RatMatrix> anisotropic;
  for (int j = 1; j <= 3; ++j)
    anisotropic.push_back({{pow(Rational(2), -j), Rational(0)}, {Rational(0), pow(Rational(2), j)}});
  CHECK(code_of([&] { near_iso_tiles(anisotropic, Rational(2)); }) == ErrorCode::ConditionExceeded);

  // A sheared matrix: inclusion holds for every vertex.
  RatMatrix shear{{Rational(1), q(1, 3)}, {Rational(0), Rational(1)}};
  auto sh = near_iso_tiles({shear}, Rational(4));
  CHECK(sh[0].inclusion_certified);
  CHECK(to_double(sh[0].sigma_min_lower) <= sh[0].sigma_min * (1 + 1e-12));
  CHECK(to_double(sh[0].sigma_min_lower) > sh[0].sigma_min * (1 - 1e-6));
}

TEST_CASE("spiral enumeration") {
  auto z = spiral_enumeration(Lattice::integer_multiples(3), 5);
  std::vector<long> v;
  for (const auto& p : z) v.push_back(p[0].get_num().get_si());
  CHECK(v == std::vector<long>{0, 3, -3, 6, -6});
  auto fin = spiral_enumeration(Lattice::cyclic(8, 2), 10);
  CHECK(fin.size() == 4);
  auto z2 = spiral_enumeration(Lattice::integer({{Integer(1), Integer(0)}, {Integer(0), Integer(1)}}), 9);
  CHECK(z2[0] == GroupPoint{Rational(0), Rational(0)});
  CHECK(z2[1] == GroupPoint{Rational(0), Rational(1)});
  CHECK(z2[2] == GroupPoint{Rational(0), Rational(-1)});
}

TEST_CASE("coset refinement") {
  std::vector<Lattice> powers2, powers3;
  for (int j = 1; j <= 5; ++j) powers2.push_back(Lattice::integer_multiples(pow(Integer(2), j)));
  for (int j = 1; j <= 3; ++j) powers3.push_back(Lattice::integer_multiples(pow(Integer(3), j)));
  Lattice z = Lattice::integer_multiples(1);
  CHECK(shifts_of(coset_refinement(z, powers2)) == std::vector<long>{0, 1, -1, 3, -5});
  CHECK(shifts_of(coset_refinement(z, powers3)) == greedy_oracle(3, 3));
  CHECK(shifts_of(coset_refinement(z, powers3)) == std::vector<long>{0, 1, -1});

  // Inductive claim: the k-th enumerated element lies in the first k cosets.
  std::vector<Lattice> mixed{Lattice::integer_multiples(2), Lattice::integer_multiples(6),
                             Lattice::integer_multiples(12), Lattice::integer_multiples(60)};
  auto d = coset_refinement(z, mixed);
  auto h = spiral_enumeration(z, 4);
  for (std::size_t k = 0; k < 4; ++k) {
    bool in = false;
    for (std::size_t j = 0; j <= k; ++j)
      in = in || d.parts[j].sublattice.contains({h[k][0] - d.parts[j].shift[0]});
    CHECK(in);
  }
  for (std::size_t a = 0; a < d.parts.size(); ++a)
    for (std::size_t b = a + 1; b < d.parts.size(); ++b)
      CHECK(cosets_disjoint(d.parts[a].shift, d.parts[a].sublattice, d.parts[b].shift, d.parts[b].sublattice));

  // Z^2 through the shell walk.
  Lattice z2 = Lattice::integer({{Integer(1), Integer(0)}, {Integer(0), Integer(1)}});
  Lattice l1 = Lattice::integer({{Integer(2), Integer(0)}, {Integer(0), Integer(1)}});
  Lattice l2 = Lattice::integer({{Integer(2), Integer(0)}, {Integer(0), Integer(2)}});
  auto d2 = coset_refinement(z2, {l1, l2});
  CHECK(d2.parts[1].shift == GroupPoint{Rational(1), Rational(0)});

  CHECK(code_of([&] { coset_refinement(z, {powers2[0], powers2[0]}); }) == ErrorCode::ChainNotStrict);
  CHECK(code_of([&] { coset_refinement(z, {powers2[0], powers3[0]}); }) == ErrorCode::NotASublattice);
}

TEST_CASE("Bownik-Rzeszotnik partition") {
  auto p = br_partition(2, 6);
  CHECK(as_longs(p.taus) == std::vector<long>{0, 1, -1, 3, -5, 11});
  CHECK(as_longs(p.taus) == greedy_oracle(2, 6));
  CHECK(p.disjoint);
  CHECK(p.covered);
  CHECK(p.window == 16);
  REQUIRE(p.closed_form.size() == 5);
  for (const auto& [value, match] : p.closed_form) CHECK(match);

  auto p3 = br_partition(3, 12);
  CHECK(as_longs(p3.taus) == greedy_oracle(3, 12));
  for (std::size_t j = 0; j < p3.taus.size(); ++j) CHECK(abs(p3.taus[j]) <= Integer(static_cast<long>(j + 1)));

  auto p20 = br_partition(2, 20);
  CHECK(p20.covered);
  CHECK(p20.window == Integer(1) << 18);
  CHECK(as_longs(p20.taus) == greedy_oracle(2, 20));

  for (long n : {2L, 3L, 5L}) {
    auto big = br_partition(n, 60, Integer(64));
    CHECK(big.disjoint);
    // Independent pairwise check with CRT residues.
    for (std::size_t j = 0; j < 60; ++j)
      for (std::size_t i = 0; i < j; ++i) CHECK(mod(big.taus[j] - big.taus[i], pow(Integer(n), i + 1)) != 0);
  }
  auto sys = br_system(2, 8);
  CHECK(sys.layers.size() == 8);
  CHECK(sys.tail->ratio == 2);
  CHECK(*bandwidth(sys).total == 1);
}

TEST_CASE("small-bandwidth orthonormal bases") {
  std::vector<Lattice> chain16{Lattice::cyclic(16, 2), Lattice::cyclic(16, 4), Lattice::cyclic(16, 8)};
  auto onb = small_bandwidth_onb(Lattice::cyclic(16, 1), chain16);
  CHECK(onb.disjoint);
  CHECK(onb.covered);
  CHECK(onb.system_bandwidth <= onb.bound);
  CHECK(onb.chain_bandwidth <= onb.bound);
  CHECK(oracle::distance_to_identity(system_operator(onb.system)) < 1e-12);

  // Two alphas over 2Z_16.
  std::vector<Lattice> chain{Lattice::cyclic(16, 4), Lattice::cyclic(16, 8), Lattice::cyclic(16, 16)};
  auto two = small_bandwidth_onb(Lattice::cyclic(16, 2), chain);
  CHECK(two.refinements.size() == 2);
  // A finite orthonormal basis always has bandwidth |G| / |G| = 1.
  CHECK(two.chain_bandwidth <= q(1, 2));
  CHECK(two.system_bandwidth == 1);
  CHECK(oracle::distance_to_identity(system_operator(two.system)) < 1e-12);

  std::vector<Lattice> dyadic;
  for (int n = 1; n <= 10; ++n) dyadic.push_back(Lattice::integer_multiples(pow(Integer(2), n)));
  auto z = small_bandwidth_onb(Lattice::integer_multiples(1), dyadic);
  CHECK(z.chain_bandwidth <= 1);
  CHECK(z.system.tail.has_value());
  CHECK(*bandwidth(z.system).total == 1);
  CHECK(*z.window == 1024);

  std::vector<Lattice> dyadic4;
  for (int n = 1; n <= 8; ++n) dyadic4.push_back(Lattice::integer_multiples(4 * pow(Integer(2), n)));
  auto z4 = small_bandwidth_onb(Lattice::integer_multiples(4), dyadic4);
  CHECK(z4.chain_bandwidth <= q(1, 4));
  CHECK(z4.system_bandwidth <= q(1, 4));
  CHECK(z4.disjoint);
}

TEST_CASE("refined systems") {
  GroupModel z64 = GroupModel::cyclic(64);
  std::mt19937 rng(5);
  oracle::Vec gv = oracle::random_vector(rng, 64);
  DenseVector g{Domain::Time, {}};
  for (auto x : gv) g.values.push_back(Scalar(x));
  GsiSystem base;
  base.model = z64;
  base.layers.push_back({Lattice::cyclic(64, 1), g, std::nullopt});

  std::vector<Lattice> chain;
  for (int j = 1; j <= 6; ++j) chain.push_back(Lattice::cyclic(64, pow(Integer(2), j)));
  CosetDecomposition d = coset_refinement(Lattice::cyclic(64, 1), chain);
  CHECK(shifts_of(d) == std::vector<long>{0, 1, 63, 3, 59, 11});
  CHECK(code_of([&] { build_refined_system(base, {d}); }) == ErrorCode::NotARefinement);
  d.parts.push_back({{Rational(43)}, Lattice::cyclic(64, 64)});  // the remaining point -21
  GsiSystem refined = build_refined_system(base, {d});
  CHECK(refined.layers.size() == 7);
  CHECK(max_difference(system_operator(base), system_operator(refined)) < 1e-9);
  CHECK(*bandwidth(refined).total <= *bandwidth(base).total);

  GsiSystem same = build_refined_system(base, {CosetDecomposition{Lattice::cyclic(64, 1), {{{Rational(0)}, Lattice::cyclic(64, 1)}}}});
  CHECK(max_difference(system_operator(base), system_operator(same)) == 0);

  CosetDecomposition twice{Lattice::cyclic(64, 1), {{{Rational(0)}, Lattice::cyclic(64, 1)}, {{Rational(1)}, Lattice::cyclic(64, 2)}}};
  CHECK(code_of([&] { build_refined_system(base, {twice}); }) == ErrorCode::NotARefinement);
}
