#include "gsi/construct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <set>

#include "gsi/error.hpp"

namespace gsi {

namespace {

constexpr std::size_t kResidueCap = std::size_t{1} << 16;
constexpr std::size_t kWalkCap = std::size_t{1} << 24;

BoxSet normalized(const BoxSet& set) {
  BoxSet out;
  for (const auto& b : set.boxes) out = unite(out, BoxSet{{b}});
  return out;
}

GroupPoint difference(const GroupPoint& a, const GroupPoint& b) {
  GroupPoint d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

std::string point_string(const GroupPoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + to_string(p[i]);
  return s + ")";
}

// Position of t in 0, 1, -1, 2, -2, ...
long spiral_key(long t) { return t > 0 ? 2 * t - 1 : -2 * t; }

// Lazily walks Z^n in shells of growing max-norm.
class ShellWalk {
 public:
  explicit ShellWalk(std::size_t n) : n_(n) {}

  std::vector<long> next() {
    while (pos_ >= shell_.size()) fill(radius_++);
    return shell_[pos_++];
  }

 private:
  void fill(long r) {
    shell_.clear();
    pos_ = 0;
    std::vector<long> z(n_, -r);
    while (true) {
      long norm = 0;
      for (long v : z) norm = std::max(norm, std::labs(v));
      if (norm == r) shell_.push_back(z);
      std::size_t i = 0;
      while (i < n_ && z[i] == r) z[i++] = -r;
      if (i == n_) break;
      ++z[i];
    }
    std::sort(shell_.begin(), shell_.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                          [](long x, long y) { return spiral_key(x) < spiral_key(y); });
    });
  }

  std::size_t n_;
  long radius_ = 0;
  std::vector<std::vector<long>> shell_;
  std::size_t pos_ = 0;
};

// Enumeration of a lattice in spiral order; nullopt once a finite lattice is exhausted.
class LatticeWalk {
 public:
  explicit LatticeWalk(const Lattice& h) : h_(h), shells_(h.dimension()) {
    if (h.ambient.kind == GroupKind::Finite) {
      step_ = h.scalar_generator().get_num();
      order_ = h.ambient.moduli[0] / step_;
    } else {
      rows_ = h.generator_rows();
      if (h.ambient.kind == GroupKind::Torus) order_ = Rational(1 / covolume(h)).get_num();
    }
  }

  std::optional<GroupPoint> next() {
    if (order_ && Integer(static_cast<unsigned long>(emitted_)) >= *order_) return std::nullopt;
    if (h_.ambient.kind == GroupKind::Finite) {
      long t = spiral_t_++;
      long v = t % 2 ? (t + 1) / 2 : -t / 2;
      ++emitted_;
      return canonical_point(h_.ambient, {Rational(Integer(v) * step_)});
    }
    while (true) {
      std::vector<long> z = shells_.next();
      RatVector zr(z.begin(), z.end());
      GroupPoint p = canonical_point(h_.ambient, row_times(zr, rows_));
      if (h_.ambient.kind == GroupKind::Torus && !seen_.insert(p).second) continue;
      ++emitted_;
      return p;
    }
  }

 private:
  Lattice h_;
  ShellWalk shells_;
  RatMatrix rows_;
  Integer step_{1};
  std::optional<Integer> order_;
  std::set<GroupPoint> seen_;
  std::size_t emitted_ = 0;
  long spiral_t_ = 0;
};

// Greedy smallest-|t| (positive on ties) representatives t_1 = 0, t_2, ...
// for nested moduli n_1 | n_2 | ...: t_{k+1} avoids every t_l + n_l Z.
std::vector<Integer> greedy_nested(const std::vector<Integer>& moduli) {
  std::vector<Integer> out{Integer(0)};
  std::optional<std::vector<Integer>> remaining = std::vector<Integer>{Integer(0)};
  Integer current(1);
  for (std::size_t k = 0; k < moduli.size(); ++k) {
    const Integer& n = moduli[k];
    if (remaining) {
      Integer factor = n / current;
      if (Integer(static_cast<unsigned long>(remaining->size())) * factor > Integer(static_cast<unsigned long>(kResidueCap))) {
        remaining.reset();
      } else {
        std::vector<Integer> expanded;
        Integer drop = mod(out[k], n);
        for (const auto& c : *remaining)
          for (Integer i = 0; i < factor; ++i) {
            Integer r = c + i * current;
            if (r != drop) expanded.push_back(r);
          }
        remaining = std::move(expanded);
      }
    }
    current = n;
    if (k + 1 == moduli.size()) break;
    if (remaining) {
      if (remaining->empty()) throw GsiError(ErrorCode::ChainNotStrict, "no element left outside the cosets");
      std::optional<Integer> best;
      auto better = [](const Integer& a, const Integer& b) {
        Integer aa = abs(a), bb = abs(b);
        return aa != bb ? aa < bb : a > b;
      };
      for (const auto& c : *remaining)
        for (Integer t : {c, Integer(c - n)})
          if (!best || better(t, *best)) best = t;
      out.push_back(*best);
    } else {
      for (long s = 0;; ++s) {
        if (static_cast<std::size_t>(s) > kWalkCap) throw GsiError(ErrorCode::ModelTooLarge, "greedy scan too long");
        Integer t = s % 2 ? Integer((s + 1) / 2) : Integer(-s / 2);
        bool free = true;
        for (std::size_t l = 0; l <= k && free; ++l) free = mod(t - out[l], moduli[l]) != 0;
        if (free) {
          out.push_back(t);
          break;
        }
      }
    }
  }
  return out;
}

void validate_chain(const Lattice& h, const std::vector<Lattice>& chain) {
  if (chain.empty()) throw GsiError(ErrorCode::InvalidInput, "empty chain");
  const Lattice* previous = &h;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (!(chain[k].ambient == h.ambient))
      throw GsiError(ErrorCode::IncompatibleAmbient, "chain lattice " + std::to_string(k + 1));
    Integer index = lattice_index(chain[k], *previous);
    if (index == 1)
      throw GsiError(ErrorCode::ChainNotStrict, "lattice " + std::to_string(k + 1) + " equals its predecessor");
    previous = &chain[k];
  }
}

bool one_dimensional_chain(const Lattice& h) {
  return h.dimension() == 1 && (h.ambient.kind == GroupKind::Integer || h.ambient.kind == GroupKind::Finite);
}

Generator sqrt_indicator(const GroupModel& model, const BoxSet& set, const Rational& covol) {
  Scalar amplitude = Scalar::sqrt_of(covol);
  if (model.kind == GroupKind::Finite) {
    long m = model.moduli[0].get_si();
    DenseVector v{Domain::Frequency, std::vector<Scalar>(m)};
    for (const auto& b : set.boxes)
      for (Integer k = ceil(b[0].lo); k < b[0].hi; ++k) v.values[k.get_si()] = amplitude;
    return v;
  }
  BoxSpectrum s;
  for (const auto& b : set.boxes) s.boxes.push_back({b, amplitude});
  s.shift = RatVector(model.dimension, Rational(0));
  return s;
}

Generator translated(const Generator& g, const GroupPoint& gamma, const GroupModel& model) {
  bool zero = std::all_of(gamma.begin(), gamma.end(), [](const Rational& q) { return q == 0; });
  return zero ? g : translate(g, gamma, model);
}

}  // namespace

BoxSet point_set(const std::vector<long>& points) {
  BoxSet out;
  for (long p : points) out = unite(out, BoxSet{{Box{Interval{Rational(p), Rational(p + 1)}}}});
  return out;
}

FrequencyTiling disjointify_tiles(const FrequencyTiling& tiling) {
  FrequencyTiling out;
  BoxSet earlier;
  for (const auto& tile : tiling.tiles) {
    BoxSet t = normalized(tile);
    out.tiles.push_back(subtract(t, earlier));
    earlier = unite(earlier, t);
  }
  return out;
}

GsiSystem shannon_generators(const GroupModel& model, const std::vector<Lattice>& lattices,
                             const FrequencyTiling& tiling, const ShannonOptions& options) {
  if (lattices.size() != tiling.tiles.size())
    throw GsiError(ErrorCode::InvalidInput, "one tile per lattice is required");
  SpectralDomain domain = SpectralDomain::dual_of(model);
  std::optional<Box> fundamental = domain.fundamental_box();

  std::vector<BoxSet> tiles;
  for (std::size_t j = 0; j < lattices.size(); ++j) {
    if (!(lattices[j].ambient == model))
      throw GsiError(ErrorCode::IncompatibleAmbient, "layer " + std::to_string(j) + " lattice");
    BoxSet tile = normalized(tiling.tiles[j]);
    for (const auto& b : tile.boxes) {
      if (b.size() != domain.dimension) throw GsiError(ErrorCode::InvalidInput, "tile dimension mismatch");
      if (fundamental && !contains(*fundamental, b))
        throw GsiError(ErrorCode::InvalidInput, "tile " + to_string(b) + " leaves the fundamental domain");
      if (domain.discrete && (!is_integer(b[0].lo) || !is_integer(b[0].hi)))
        throw GsiError(ErrorCode::InvalidInput, "tiles on a finite dual group are unions of points");
    }
    tiles.push_back(std::move(tile));
  }

  for (std::size_t j = 0; j < tiles.size(); ++j) {
    if (tiles[j].empty()) continue;
    Lattice dual = dual_lattice(lattices[j]);
    std::vector<GroupPoint> gammas;
    if (dual.ambient.is_compact()) {
      gammas = lattice_points(dual);
    } else {
      RatVector lo(domain.dimension), hi(domain.dimension);
      for (std::size_t i = 0; i < domain.dimension; ++i) {
        lo[i] = tiles[j].boxes[0][i].lo;
        hi[i] = tiles[j].boxes[0][i].hi;
        for (const auto& b : tiles[j].boxes) {
          if (b[i].lo < lo[i]) lo[i] = b[i].lo;
          if (b[i].hi > hi[i]) hi[i] = b[i].hi;
        }
      }
      RatVector width(domain.dimension), neg(domain.dimension);
      for (std::size_t i = 0; i < domain.dimension; ++i) {
        width[i] = hi[i] - lo[i];
        neg[i] = -width[i];
      }
      gammas = lattice_points_in_box(dual, neg, width);
    }
    for (const auto& gamma : gammas) {
      if (std::all_of(gamma.begin(), gamma.end(), [](const Rational& q) { return q == 0; })) continue;
      BoxSet shifted;
      for (const auto& b : tiles[j].boxes) {
        Box t = translate(b, gamma);
        if (domain.period)
          for (auto& w : wrap_periodic(t, *domain.period)) shifted.boxes.push_back(w);
        else
          shifted.boxes.push_back(t);
      }
      if (volume(intersection(tiles[j], shifted)) > 0)
        throw GsiError(ErrorCode::TilingViolation,
                       "layer " + std::to_string(j) + ", gamma=" + point_string(gamma));
    }
  }

  std::optional<Box> region = fundamental ? fundamental : options.region;
  if (!region) throw GsiError(ErrorCode::InvalidInput, "a coverage region is required on R^n");
  BoxSet rest{{*region}};
  for (const auto& t : tiles) rest = subtract(rest, t);
  if (!rest.empty()) throw GsiError(ErrorCode::TilingViolation, "uncovered cell " + to_string(rest.boxes.front()));

  FrequencyTiling disjoint = disjointify_tiles(FrequencyTiling{tiles});
  bool onb = true;
  for (std::size_t j = 0; j < tiles.size() && onb; ++j) {
    onb = volume(disjoint.tiles[j]) == volume(tiles[j]) &&
          domain.density * volume(tiles[j]) == 1 / covolume(lattices[j]);
  }

  GsiSystem system;
  system.label = "shannon";
  system.model = model;
  for (std::size_t j = 0; j < tiles.size(); ++j)
    system.layers.push_back({lattices[j], sqrt_indicator(model, disjoint.tiles[j], covolume(lattices[j])), std::nullopt});
  system.claims.parseval = true;
  system.claims.onb = onb;
  return system;
}

CubeCover cube_cover(const std::vector<Rational>& sides, const Box& target) {
  if (is_empty(target)) throw GsiError(ErrorCode::InvalidInput, "empty target");
  std::size_t n = target.size();
  CubeCover out;
  out.sides = sides;
  out.target = target;
  out.shifts.assign(sides.size(), std::nullopt);
  Rational total(0);
  for (const auto& s : sides) {
    if (s <= 0) throw GsiError(ErrorCode::InvalidInput, "side lengths must be positive");
    out.rounded.push_back(floor_power_of_two(s));
    total += pow(s, static_cast<long>(n));
  }
  if (total < volume(target))
    throw GsiError(ErrorCode::InsufficientVolume, "total cube volume " + to_string(total) + " below target volume");

  std::vector<std::size_t> order(sides.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.rounded[a] > out.rounded[b]; });

  RatVector anchor = lower_corner(target);
  BoxSet remaining{{target}};
  for (std::size_t idx : order) {
    if (remaining.empty()) break;
    const Box& first = *std::min_element(remaining.boxes.begin(), remaining.boxes.end(), [](const Box& a, const Box& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                          [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    });
    const Rational& s = out.rounded[idx];
    RatVector tau(n);
    Box cell(n);
    for (std::size_t i = 0; i < n; ++i) {
      tau[i] = anchor[i] + s * Rational(floor((first[i].lo - anchor[i]) / s));
      cell[i] = Interval{tau[i], tau[i] + s};
    }
    out.shifts[idx] = tau;
    remaining = subtract(remaining, cell);
  }

  BoxSet certificate{{target}};
  for (std::size_t j = 0; j < sides.size(); ++j) {
    if (!out.shifts[j]) continue;
    Box cube(n);
    for (std::size_t i = 0; i < n; ++i) cube[i] = Interval{(*out.shifts[j])[i], (*out.shifts[j])[i] + sides[j]};
    certificate = subtract(certificate, cube);
  }
  out.covered = certificate.empty();
  out.remainder_volume = volume(certificate);
  if (!out.covered)
    throw GsiError(ErrorCode::InsufficientVolume,
                   "sides exhausted with uncovered volume " + to_string(out.remainder_volume));
  return out;
}

std::vector<NearIsoTile> near_iso_tiles(const std::vector<RatMatrix>& matrices, const Rational& bound) {
  std::vector<NearIsoTile> out;
  for (std::size_t j = 0; j < matrices.size(); ++j) {
    const RatMatrix& c = matrices[j];
    std::size_t n = c.size();
    if (n == 0 || c[0].size() != n) throw GsiError(ErrorCode::InvalidInput, "matrices must be square");
    if (determinant(c) == 0) throw GsiError(ErrorCode::SingularMatrix, "matrix " + std::to_string(j));
    RatMatrix a = transpose(inverse(c));
    Eigen::MatrixXd ad(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) ad(r, k) = to_double(a[r][k]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ad);
    NearIsoTile tile;
    tile.sigma_max = svd.singularValues()(0);
    tile.sigma_min = svd.singularValues()(n - 1);
    double condition = tile.sigma_max / tile.sigma_min;
    if (condition > to_double(bound) * (1 + 1e-9))
      throw GsiError(ErrorCode::ConditionExceeded,
                     "matrix " + std::to_string(j) + ": condition " + std::to_string(condition));

    // sigma_min(A) >= s iff A^T A - s^2 I is positive semidefinite.
    RatMatrix gram = multiply(transpose(a), a);
    auto certified = [&](const Rational& s) {
      RatMatrix m = gram;
      for (std::size_t i = 0; i < n; ++i) m[i][i] -= s * s;
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
          if (mask & (1u << i)) idx.push_back(i);
        RatMatrix minor(idx.size(), RatVector(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r)
          for (std::size_t k = 0; k < idx.size(); ++k) minor[r][k] = m[idx[r]][idx[k]];
        if (determinant(minor) < 0) return false;
      }
      return true;
    };
    Rational s = rationalize(tile.sigma_min, 1e-12 * tile.sigma_min);
    if (!certified(s)) s = rationalize(tile.sigma_min * (1 - 1e-9), 1e-13 * tile.sigma_min);
    while (!certified(s)) s /= 2;
    tile.sigma_min_lower = s;

    Rational side = s / Rational(Integer(static_cast<unsigned long>(4 * n * n)));
    tile.cube.assign(n, Interval{Rational(-side / 2), Rational(side / 2)});
    tile.inclusion_certified = true;
    RatMatrix ct = transpose(c);
    for (unsigned mask = 0; mask < (1u << n) && tile.inclusion_certified; ++mask) {
      RatVector v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = (mask & (1u << i)) ? Rational(side / 2) : Rational(-side / 2);
      for (std::size_t r = 0; r < n; ++r) {
        Rational u(0);
        for (std::size_t k = 0; k < n; ++k) u += ct[r][k] * v[k];
        if (!(abs(u) < ratio(1, 2))) tile.inclusion_certified = false;
      }
    }
    out.push_back(std::move(tile));
  }
  return out;
}

std::vector<GroupPoint> spiral_enumeration(const Lattice& h, std::size_t count) {
  LatticeWalk walk(h);
  std::vector<GroupPoint> out;
  while (out.size() < count) {
    auto p = walk.next();
    if (!p) break;
    out.push_back(std::move(*p));
  }
  return out;
}

CosetDecomposition coset_refinement(const Lattice& h, const std::vector<Lattice>& chain) {
  validate_chain(h, chain);
  CosetDecomposition out{h, {}};
  if (one_dimensional_chain(h)) {
    Integer base = h.scalar_generator().get_num();
    std::vector<Integer> moduli;
    for (const auto& l : chain) moduli.push_back(l.scalar_generator().get_num() / base);
    std::vector<Integer> t = greedy_nested(moduli);
    for (std::size_t k = 0; k < chain.size(); ++k)
      out.parts.push_back({canonical_point(h.ambient, {Rational(t[k] * base)}), chain[k]});
    return out;
  }
  LatticeWalk walk(h);
  std::size_t steps = 0;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    while (true) {
      auto x = walk.next();
      if (!x) throw GsiError(ErrorCode::ChainNotStrict, "enumeration exhausted");
      if (++steps > kWalkCap) throw GsiError(ErrorCode::ModelTooLarge, "enumeration too long");
      bool covered = false;
      for (const auto& part : out.parts)
        if (part.sublattice.contains(difference(*x, part.shift))) {
          covered = true;
          break;
        }
      if (!covered) {
        out.parts.push_back({*x, chain[k]});
        break;
      }
    }
  }
  return out;
}

SmallBandwidthOnb small_bandwidth_onb(const Lattice& base, const std::vector<Lattice>& chain,
                                      const std::optional<Integer>& window) {
  const GroupModel& model = base.ambient;
  if (!one_dimensional_chain(base))
    throw GsiError(ErrorCode::UnsupportedModel, "small-bandwidth bases are built on cZ and dZ_M");
  validate_chain(base, chain);
  bool finite = model.kind == GroupKind::Finite;

  SmallBandwidthOnb out;
  Rational covol0 = covolume(base);
  out.bound = 1 / covol0;
  for (const auto& l : chain) out.chain_bandwidth += 1 / covolume(l);

  std::vector<GroupPoint> alphas = lattice_points(dual_lattice(base));
  std::sort(alphas.begin(), alphas.end());
  std::size_t count = alphas.size();

  // Fundamental domain K of the dual modulo Gamma_0^perp, then K_alpha = alpha + K.
  Rational cell = finite ? Rational(model.moduli[0] / covol0) : Rational(1 / covol0);
  std::vector<Generator> g;
  for (const auto& alpha : alphas) {
    Box k{Interval{alpha[0], alpha[0] + cell}};
    g.push_back(sqrt_indicator(model, BoxSet{{k}}, covol0));
  }

  GsiSystem& system = out.system;
  system.label = "small-bandwidth-onb";
  system.model = model;
  out.disjoint = true;
  out.covered = true;
  std::vector<std::vector<std::size_t>> chain_of(count);
  for (std::size_t n = 0; n < chain.size(); ++n) chain_of[n % count].push_back(n);

  std::vector<std::pair<std::size_t, Layer>> ordered;  // (chain index or sentinel, layer)
  const std::size_t completion = chain.size();
  for (std::size_t a = 0; a < count; ++a) {
    CosetDecomposition d{base, {}};
    if (chain_of[a].empty()) {
      d.parts.push_back({GroupPoint{Rational(0)}, base});
      ordered.push_back({completion + 1, Layer{base, g[a], std::nullopt}});
    } else {
      std::vector<Lattice> sub;
      for (std::size_t n : chain_of[a]) sub.push_back(chain[n]);
      d = coset_refinement(base, sub);
      for (std::size_t i = 0; i < d.parts.size(); ++i)
        ordered.push_back({chain_of[a][i], Layer{d.parts[i].sublattice, translated(g[a], d.parts[i].shift, model), std::nullopt}});
      if (finite) {
        const Lattice& last = sub.back();
        for (const auto& rep : index_and_cosets(last, base).representatives) {
          bool hit = false;
          for (const auto& part : d.parts) hit = hit || part.sublattice.contains(difference(rep, part.shift));
          if (!hit) {
            d.parts.push_back({rep, last});
            ordered.push_back({completion, Layer{last, translated(g[a], rep, model), std::nullopt}});
          }
        }
      }
    }
    for (std::size_t i = 0; i < d.parts.size(); ++i)
      for (std::size_t k = i + 1; k < d.parts.size(); ++k)
        if (!cosets_disjoint(d.parts[i].shift, d.parts[i].sublattice, d.parts[k].shift, d.parts[k].sublattice))
          out.disjoint = false;
    if (finite) {
      Rational density(0);
      for (const auto& part : d.parts) density += 1 / Rational(lattice_index(part.sublattice, base));
      if (density != 1) out.covered = false;
    }
    out.refinements.push_back(std::move(d));
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (auto& [key, layer] : ordered) {
    out.system_bandwidth += 1 / covolume(layer.lattice);
    system.layers.push_back(std::move(layer));
  }

  if (!finite) {
    Integer w = window.value_or(Integer(1) << 10);
    out.window = w;
    Integer c0 = base.scalar_generator().get_num();
    for (const auto& d : out.refinements)
      for (Integer x = -(w / c0) * c0; x <= w; x += c0) {
        bool hit = false;
        for (const auto& part : d.parts) hit = hit || part.sublattice.contains(difference({Rational(x)}, part.shift));
        if (!hit) {
          out.covered = false;
          if (out.uncovered.size() < 16) out.uncovered.push_back({Rational(x)});
        }
      }
    // One alpha over Z with a geometric chain continues as a symbolic tail.
    if (count == 1) {
      std::optional<Rational> r;
      bool geometric = chain.size() >= 2;
      for (std::size_t n = 1; n < chain.size() && geometric; ++n) {
        Rational q = covolume(chain[n]) / covolume(chain[n - 1]);
        if (r && *r != q) geometric = false;
        r = q;
      }
      if (geometric) system.tail = GeometricTail{*r, covol0, true};
    }
  }
  system.claims.onb = finite || system.tail.has_value();
  return out;
}

BrPartition br_partition(long n, std::size_t count, const std::optional<Integer>& window) {
  if (n < 2) throw GsiError(ErrorCode::InvalidInput, "N must be at least 2");
  if (count == 0) throw GsiError(ErrorCode::InvalidInput, "count must be positive");
  BrPartition out;
  out.n = n;
  std::vector<Integer> moduli;
  for (std::size_t j = 1; j <= count; ++j) moduli.push_back(pow(Integer(n), j));
  out.taus = greedy_nested(moduli);

  out.disjoint = true;
  for (std::size_t j = 1; j < count && out.disjoint; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (mod(out.taus[j] - out.taus[i], moduli[i]) == 0) {
        out.disjoint = false;
        out.disjoint_witness = {Integer(static_cast<unsigned long>(i + 1)), Integer(static_cast<unsigned long>(j + 1))};
        break;
      }

  auto covers = [&](const Integer& x) {
    for (std::size_t j = 0; j < count; ++j)
      if (mod(x - out.taus[j], moduli[j]) == 0) return true;
    return false;
  };
  const Integer cap = Integer(1) << 20;
  if (window) {
    out.window = *window;
  } else if (n == 2) {
    out.window = count >= 2 ? Integer(1) << (count - 2) : Integer(0);
    if (out.window > cap) out.window = cap;
  } else {
    Integer w(0);
    while (w < (Integer(1) << 12) && covers(w + 1) && covers(-(w + 1))) ++w;
    out.window = covers(Integer(0)) ? w : Integer(-1);
  }
  out.covered = out.window >= 0;
  for (Integer x = -out.window; x <= out.window; ++x)
    if (!covers(x)) {
      out.covered = false;
      if (out.uncovered.size() < 16) out.uncovered.push_back(x);
    }
  if (out.window < 0) out.window = 0;

  if (n == 2)
    for (std::size_t j = 1; j < count; ++j) {
      Integer v = (1 - pow(Integer(-2), j)) / 3;
      out.closed_form.push_back({v, v == out.taus[j]});
    }
  return out;
}

GsiSystem br_system(long n, std::size_t count) {
  BrPartition p = br_partition(n, count, Integer(0));
  GsiSystem system;
  system.label = "bownik-rzeszotnik N=" + std::to_string(n);
  system.model = GroupModel::integers();
  for (std::size_t j = 0; j < count; ++j)
    system.layers.push_back({Lattice::integer_multiples(pow(Integer(n), j + 1)),
                             FiniteSequence{p.taus[j], {Scalar(Rational(1))}}, std::nullopt});
  system.tail = GeometricTail{Rational(n), Rational(1), true};
  system.claims.onb = true;
  return system;
}

GsiSystem build_refined_system(const GsiSystem& system, const std::vector<CosetDecomposition>& decompositions) {
  if (decompositions.size() != system.layers.size())
    throw GsiError(ErrorCode::NotARefinement, "one decomposition per layer is required");
  GsiSystem out;
  out.label = system.label.empty() ? "refined" : system.label + " (refined)";
  out.model = system.model;
  out.tail = system.tail;
  out.claims = system.claims;

  for (std::size_t j = 0; j < decompositions.size(); ++j) {
    const Lattice& gamma = system.layers[j].lattice;
    const auto& parts = decompositions[j].parts;
    std::string where = "layer " + std::to_string(j) + ": ";
    if (!(decompositions[j].ambient == gamma)) throw GsiError(ErrorCode::NotARefinement, where + "ambient lattice differs");
    if (parts.empty()) throw GsiError(ErrorCode::NotARefinement, where + "no cosets");
    for (const auto& part : parts) {
      if (!(part.sublattice.ambient == gamma.ambient) || !gamma.contains(part.shift))
        throw GsiError(ErrorCode::NotARefinement, where + "shift " + point_string(part.shift) + " outside the lattice");
      try {
        lattice_index(part.sublattice, gamma);
      } catch (const GsiError&) {
        throw GsiError(ErrorCode::NotARefinement, where + "coset lattice is not a sublattice");
      }
    }
    Lattice common = parts[0].sublattice;
    for (const auto& part : parts) common = intersect(common, part.sublattice);
    std::optional<CosetIndex> reps;
    try {
      reps = index_and_cosets(common, gamma);
    } catch (const GsiError& e) {
      if (e.code() != ErrorCode::ModelTooLarge) throw;
    }
    if (reps) {
      for (const auto& r : reps->representatives) {
        int hits = 0;
        for (const auto& part : parts) hits += part.sublattice.contains(difference(r, part.shift)) ? 1 : 0;
        if (hits == 0) throw GsiError(ErrorCode::NotARefinement, where + "uncovered element " + point_string(r));
        if (hits > 1) throw GsiError(ErrorCode::NotARefinement, where + "element " + point_string(r) + " covered twice");
      }
    } else {
      Rational density(0);
      for (std::size_t a = 0; a < parts.size(); ++a) {
        density += 1 / Rational(lattice_index(parts[a].sublattice, gamma));
        for (std::size_t b = a + 1; b < parts.size(); ++b)
          if (!cosets_disjoint(parts[a].shift, parts[a].sublattice, parts[b].shift, parts[b].sublattice))
            throw GsiError(ErrorCode::NotARefinement, where + "cosets " + std::to_string(a) + " and " +
                                                          std::to_string(b) + " overlap");
      }
      if (density != 1) throw GsiError(ErrorCode::NotARefinement, where + "cosets do not cover the lattice");
    }
    const Layer& layer = system.layers[j];
    for (const auto& part : parts) {
      Layer refined{part.sublattice, translated(layer.g, part.shift, system.model), std::nullopt};
      if (layer.h) refined.h = translated(*layer.h, part.shift, system.model);
      out.layers.push_back(std::move(refined));
    }
  }
  return out;
}

}  // namespace gsi
