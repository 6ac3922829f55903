#include "gsi/group_model.hpp"

#include <cmath>
#include <numbers>

#include "gsi/error.hpp"

namespace gsi {

GroupModel GroupModel::finite_abelian(std::vector<Integer> moduli) {
  if (moduli.empty()) throw GsiError(ErrorCode::InvalidInput, "finite group needs at least one modulus");
  for (const auto& m : moduli)
    if (m <= 0) throw GsiError(ErrorCode::InvalidInput, "moduli must be positive");
  GroupModel g;
  g.kind = GroupKind::Finite;
  g.dimension = moduli.size();
  g.moduli = std::move(moduli);
  return g;
}

GroupModel GroupModel::integers(std::size_t dimension) {
  GroupModel g;
  g.kind = GroupKind::Integer;
  g.dimension = dimension;
  return g;
}

GroupModel GroupModel::reals(std::size_t dimension) {
  GroupModel g;
  g.kind = GroupKind::Real;
  g.dimension = dimension;
  return g;
}

Integer GroupModel::order() const {
  Integer n(1);
  for (const auto& m : moduli) n *= m;
  return n;
}

Rational GroupModel::point_mass() const {
  if (kind != GroupKind::Finite && kind != GroupKind::Integer) return Rational(0);
  if (kind == GroupKind::Integer || !is_dual) return Rational(1);
  return Rational(1) / Rational(order());
}

std::optional<Rational> GroupModel::total_measure() const {
  switch (kind) {
    case GroupKind::Finite: return Rational(order()) * point_mass();
    case GroupKind::Torus: return Rational(1);
    case GroupKind::Integer:
    case GroupKind::Real: return std::nullopt;
  }
  return std::nullopt;
}

std::string GroupModel::name() const {
  switch (kind) {
    case GroupKind::Finite: return is_dual ? "finite-dual" : "finite";
    case GroupKind::Integer: return "integer";
    case GroupKind::Torus: return "torus";
    case GroupKind::Real: return is_dual ? "real-dual" : "real";
  }
  return "unknown";
}

GroupModel dual_group(const GroupModel& model) {
  GroupModel d = model;
  switch (model.kind) {
    case GroupKind::Finite:
    case GroupKind::Real: d.is_dual = !model.is_dual; break;
    case GroupKind::Integer: d.kind = GroupKind::Torus; break;
    case GroupKind::Torus: d.kind = GroupKind::Integer; break;
  }
  return d;
}

GroupPoint canonical_point(const GroupModel& model, GroupPoint point) {
  if (point.size() != model.dimension)
    throw GsiError(ErrorCode::InvalidInput, "point dimension does not match the group");
  switch (model.kind) {
    case GroupKind::Finite:
      for (std::size_t i = 0; i < point.size(); ++i) {
        if (!is_integer(point[i])) throw GsiError(ErrorCode::InvalidInput, "finite group points are integers");
        point[i] = Rational(mod(point[i].get_num(), model.moduli[i]));
      }
      break;
    case GroupKind::Integer:
      for (const auto& q : point)
        if (!is_integer(q)) throw GsiError(ErrorCode::InvalidInput, "integer group points are integers");
      break;
    case GroupKind::Torus:
      for (auto& q : point) q = frac(q);
      break;
    case GroupKind::Real: break;
  }
  return point;
}

Rational character_phase(const GroupModel& model, const GroupPoint& x, const GroupPoint& omega) {
  if (x.size() != model.dimension || omega.size() != model.dimension)
    throw GsiError(ErrorCode::InvalidInput, "character arguments have the wrong dimension");
  Rational turns(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (model.kind == GroupKind::Finite)
      turns += x[i] * omega[i] / Rational(model.moduli[i]);
    else
      turns += x[i] * omega[i];
  }
  return frac(turns);
}

std::complex<double> character_value(const GroupModel& model, const GroupPoint& x, const GroupPoint& omega) {
  Rational t = character_phase(model, x, omega);
  // Exact values at quarter turns keep the multiplicativity tests tight.
  if (t == 0) return {1.0, 0.0};
  if (t == Rational(1, 2)) return {-1.0, 0.0};
  if (t == Rational(1, 4)) return {0.0, 1.0};
  if (t == Rational(3, 4)) return {0.0, -1.0};
  double angle = 2.0 * std::numbers::pi * to_double(t);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace gsi
