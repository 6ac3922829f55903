#include "gsi/lattice.hpp"

#include <algorithm>

#include "gsi/error.hpp"

namespace gsi {

namespace {

const CyclicSublattice* as_cyclic(const Lattice& l) { return std::get_if<CyclicSublattice>(&l.data); }

RatMatrix rational_basis(const Lattice& l) {
  if (auto p = std::get_if<IntLattice>(&l.data)) return to_rational(p->basis);
  if (auto p = std::get_if<RatLattice>(&l.data)) return p->basis;
  const auto& c = std::get<CyclicSublattice>(l.data);
  return {{Rational(c.step)}};
}

IntMatrix integral(const RatMatrix& m, ErrorCode code, const char* what) {
  IntMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].reserve(m[i].size());
    for (const auto& q : m[i]) {
      if (!is_integer(q)) throw GsiError(code, what);
      out[i].push_back(q.get_num());
    }
  }
  return out;
}

// Lattice of the same kind as `like`, spanned by `rows`.
Lattice rebuild(const Lattice& like, const RatMatrix& rows) {
  Lattice out;
  out.ambient = like.ambient;
  switch (like.ambient.kind) {
    case GroupKind::Integer: {
      RatLattice r = canonicalize_rational(rows);
      out.data = IntLattice{integral(r.basis, ErrorCode::InvalidInput, "lattice is not integral")};
      break;
    }
    case GroupKind::Torus: {
      RatMatrix all = rows;
      for (auto& row : identity(like.ambient.dimension)) all.push_back(row);
      out.data = canonicalize_rational(all);
      break;
    }
    case GroupKind::Real: out.data = canonicalize_rational(rows); break;
    case GroupKind::Finite: throw GsiError(ErrorCode::UnsupportedModel, "finite lattices are cyclic");
  }
  return out;
}

void require_same_ambient(const Lattice& a, const Lattice& b) {
  if (!(a.ambient == b.ambient))
    throw GsiError(ErrorCode::IncompatibleAmbient, a.ambient.name() + " vs " + b.ambient.name());
}

void require_single_modulus(const GroupModel& model) {
  if (model.kind == GroupKind::Finite && model.moduli.size() != 1)
    throw GsiError(ErrorCode::UnsupportedModel, "lattices are supported in cyclic groups Z_M only");
}

RatVector difference(const GroupPoint& a, const GroupPoint& b) {
  RatVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

CyclicSublattice subgroup_for_divisor(const Integer& modulus, const Integer& divisor) {
  if (modulus <= 0) throw GsiError(ErrorCode::InvalidInput, "modulus must be positive");
  if (divisor <= 0 || modulus % divisor != 0)
    throw GsiError(ErrorCode::NotADivisor, to_string(divisor) + " does not divide " + to_string(modulus));
  return {modulus, divisor};
}

std::vector<Integer> elements(const CyclicSublattice& lattice) {
  std::vector<Integer> out;
  for (Integer x = 0; x < lattice.modulus; x += lattice.step) out.push_back(x);
  return out;
}

Lattice Lattice::integer(const IntMatrix& basis) {
  Lattice l;
  l.ambient = GroupModel::integers(basis.size());
  l.data = hnf_canonicalize(basis);
  return l;
}

Lattice Lattice::integer_multiples(const Integer& c) {
  if (c == 0) throw GsiError(ErrorCode::SingularMatrix, "0Z is not a lattice");
  return integer({{Integer(::abs(c))}});
}

Lattice Lattice::cyclic(const Integer& modulus, const Integer& step, bool dual_side) {
  Lattice l;
  l.ambient = GroupModel::cyclic(modulus);
  l.ambient.is_dual = dual_side;
  l.data = subgroup_for_divisor(modulus, step);
  return l;
}

Lattice Lattice::real(const RatMatrix& basis, bool dual_side) {
  if (basis.empty() || basis.size() != basis[0].size())
    throw GsiError(ErrorCode::InvalidInput, "real lattices need a square basis");
  Lattice l;
  l.ambient = GroupModel::reals(basis.size());
  l.ambient.is_dual = dual_side;
  l.data = canonicalize_rational(basis);
  return l;
}

Lattice Lattice::torus(const RatMatrix& basis) {
  if (basis.empty()) throw GsiError(ErrorCode::InvalidInput, "empty basis");
  Lattice l;
  l.ambient = GroupModel::integers(basis[0].size());
  l.ambient.kind = GroupKind::Torus;
  return rebuild(l, basis);
}

bool Lattice::contains(const GroupPoint& x) const {
  GroupPoint p = canonical_point(ambient, x);
  if (auto c = as_cyclic(*this)) return mod(p[0].get_num(), c->step) == 0;
  RatVector z = row_times(p, inverse(rational_basis(*this)));
  return std::all_of(z.begin(), z.end(), [](const Rational& q) { return is_integer(q); });
}

RatMatrix Lattice::generator_rows() const { return rational_basis(*this); }

Rational Lattice::scalar_generator() const {
  if (dimension() != 1) throw GsiError(ErrorCode::InvalidInput, "not a one-dimensional lattice");
  return rational_basis(*this)[0][0];
}

IntLattice hnf_canonicalize(const IntMatrix& matrix) {
  if (matrix.empty() || matrix.size() != matrix[0].size())
    throw GsiError(ErrorCode::InvalidInput, "basis must be square");
  if (determinant(matrix) == 0) throw GsiError(ErrorCode::SingularMatrix, "basis has determinant 0");
  return IntLattice{hermite_normal_form(matrix)};
}

RatLattice canonicalize_rational(const RatMatrix& rows) {
  if (rows.empty()) throw GsiError(ErrorCode::InvalidInput, "empty basis");
  Integer d = common_denominator(rows);
  IntMatrix scaled(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& q : rows[i]) {
      Rational s = q * d;
      scaled[i].push_back(s.get_num());
    }
  IntMatrix h = hermite_normal_form(scaled);
  RatMatrix out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    for (const auto& z : h[i]) {
      Rational q(z, d);
      q.canonicalize();
      out[i].push_back(q);
    }
  return RatLattice{out};
}

Rational covolume(const IntLattice& lattice) { return abs(Rational(determinant(lattice.basis))); }
Rational covolume(const RatLattice& lattice) { return abs(determinant(lattice.basis)); }
Rational covolume(const CyclicSublattice& lattice) { return Rational(lattice.step); }

Rational covolume(const Lattice& lattice) {
  if (auto c = as_cyclic(lattice)) return Rational(c->step) * lattice.ambient.point_mass();
  return abs(determinant(rational_basis(lattice)));
}

Lattice dual_lattice(const Lattice& lattice) {
  require_single_modulus(lattice.ambient);
  Lattice out;
  out.ambient = dual_group(lattice.ambient);
  if (auto c = as_cyclic(lattice)) {
    out.data = subgroup_for_divisor(c->modulus, c->modulus / c->step);
    return out;
  }
  RatMatrix dual = transpose(inverse(rational_basis(lattice)));
  switch (lattice.ambient.kind) {
    case GroupKind::Integer: {
      RatMatrix all = dual;
      for (auto& row : identity(lattice.dimension())) all.push_back(row);
      out.data = canonicalize_rational(all);
      break;
    }
    case GroupKind::Torus:
      out.data = hnf_canonicalize(integral(dual, ErrorCode::InvalidInput, "torus subgroup does not contain Z^n"));
      break;
    default: out.data = canonicalize_rational(dual); break;
  }
  return out;
}

Lattice lattice_sum(const Lattice& a, const Lattice& b) {
  require_same_ambient(a, b);
  if (auto ca = as_cyclic(a)) {
    Lattice out = a;
    out.data = CyclicSublattice{ca->modulus, gcd(ca->step, as_cyclic(b)->step)};
    return out;
  }
  RatMatrix rows = rational_basis(a);
  for (auto& row : rational_basis(b)) rows.push_back(row);
  return rebuild(a, rows);
}

Lattice intersect(const Lattice& a, const Lattice& b) {
  require_same_ambient(a, b);
  if (auto ca = as_cyclic(a)) {
    Lattice out = a;
    out.data = CyclicSublattice{ca->modulus, lcm(ca->step, as_cyclic(b)->step)};
    return out;
  }
  return dual_lattice(lattice_sum(dual_lattice(a), dual_lattice(b)));
}

namespace {

// Coordinates of `sub` relative to `super`, in Hermite form.
IntMatrix relative_hnf(const Lattice& sub, const Lattice& super) {
  RatMatrix z = multiply(rational_basis(sub), inverse(rational_basis(super)));
  return hermite_normal_form(integral(z, ErrorCode::NotASublattice, "sub is not contained in super"));
}

}  // namespace

Integer lattice_index(const Lattice& sub, const Lattice& super) {
  require_same_ambient(sub, super);
  if (auto cs = as_cyclic(sub)) {
    const auto& step = as_cyclic(super)->step;
    if (cs->step % step != 0) throw GsiError(ErrorCode::NotASublattice, "sub is not contained in super");
    return cs->step / step;
  }
  IntMatrix h = relative_hnf(sub, super);
  Integer index(1);
  for (std::size_t i = 0; i < h.size(); ++i) index *= h[i][i];
  return index;
}

CosetIndex index_and_cosets(const Lattice& sub, const Lattice& super, std::size_t max_representatives) {
  CosetIndex out;
  out.index = lattice_index(sub, super);
  if (out.index > Integer(static_cast<unsigned long>(max_representatives)))
    throw GsiError(ErrorCode::ModelTooLarge, "index " + to_string(out.index) + " too large to enumerate");
  if (auto cs = as_cyclic(sub)) {
    (void)cs;
    const auto& step = as_cyclic(super)->step;
    for (Integer k = 0; k < out.index; ++k) out.representatives.push_back({Rational(k * step)});
    return out;
  }
  IntMatrix h = relative_hnf(sub, super);
  RatMatrix basis = rational_basis(super);
  std::size_t n = h.size();
  IntVector r(n, Integer(0));
  while (true) {
    RatVector coords(r.begin(), r.end());
    out.representatives.push_back(canonical_point(super.ambient, row_times(coords, basis)));
    std::size_t i = 0;
    while (i < n) {
      if (++r[i] < h[i][i]) break;
      r[i] = 0;
      ++i;
    }
    if (i == n) break;
  }
  std::sort(out.representatives.begin(), out.representatives.end());
  return out;
}

bool cosets_disjoint(const GroupPoint& a, const Lattice& A, const GroupPoint& b, const Lattice& B) {
  return !lattice_sum(A, B).contains(difference(a, b));
}

bool duals_independent(const std::vector<Lattice>& lattices) {
  std::vector<Integer> c;
  for (const auto& l : lattices) {
    if (l.dimension() != 1 || (l.ambient.kind != GroupKind::Integer && l.ambient.kind != GroupKind::Finite))
      throw GsiError(ErrorCode::UnsupportedModel, "independence is decided for cZ and cZ_M only");
    Rational g = l.scalar_generator();
    if (!is_integer(g) || g < 2) throw GsiError(ErrorCode::InvalidInput, "generators must be integers >= 2");
    c.push_back(g.get_num());
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (gcd(c[i], c[j]) != 1) return false;
  return true;
}

std::vector<GroupPoint> lattice_points(const Lattice& lattice) {
  if (auto c = as_cyclic(lattice)) {
    std::vector<GroupPoint> out;
    for (const auto& x : elements(*c)) out.push_back({Rational(x)});
    return out;
  }
  if (lattice.ambient.kind != GroupKind::Torus)
    throw GsiError(ErrorCode::InvalidInput, "lattice has infinitely many points");
  Lattice integers = Lattice::torus(identity(lattice.dimension()));
  return index_and_cosets(integers, lattice).representatives;
}

std::vector<GroupPoint> lattice_points_in_box(const Lattice& lattice, const RatVector& lo, const RatVector& hi) {
  std::size_t n = lattice.dimension();
  if (lo.size() != n || hi.size() != n) throw GsiError(ErrorCode::InvalidInput, "box dimension mismatch");
  auto inside = [&](const GroupPoint& p) {
    for (std::size_t i = 0; i < n; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  };
  std::vector<GroupPoint> out;
  if (lattice.ambient.is_compact()) {
    for (auto& p : lattice_points(lattice))
      if (inside(p)) out.push_back(std::move(p));
    return out;
  }
  RatMatrix basis = rational_basis(lattice);
  RatMatrix inv = inverse(basis);
  // Coordinate ranges over the corners of the box.
  IntVector zlo(n), zhi(n);
  for (std::size_t k = 0; k < n; ++k) {
    Rational mn, mx;
    for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
      Rational v(0);
      for (std::size_t i = 0; i < n; ++i) v += ((corner >> i) & 1 ? hi[i] : lo[i]) * inv[i][k];
      if (corner == 0 || v < mn) mn = v;
      if (corner == 0 || v > mx) mx = v;
    }
    zlo[k] = ceil(mn);
    zhi[k] = floor(mx);
    if (zlo[k] > zhi[k]) return out;
  }
  Integer total(1);
  for (std::size_t k = 0; k < n; ++k) total *= zhi[k] - zlo[k] + 1;
  if (total > Integer(1L << 24)) throw GsiError(ErrorCode::ModelTooLarge, "too many lattice points in box");
  IntVector z = zlo;
  while (true) {
    RatVector coords(z.begin(), z.end());
    GroupPoint p = row_times(coords, basis);
    if (inside(p)) out.push_back(std::move(p));
    std::size_t i = 0;
    while (i < n) {
      if (++z[i] <= zhi[i]) break;
      z[i] = zlo[i];
      ++i;
    }
    if (i == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gsi
