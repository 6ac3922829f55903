#include "gsi/geometry.hpp"

#include "gsi/error.hpp"

namespace gsi {

bool is_empty(const Box& box) {
  for (const auto& i : box)
    if (i.empty()) return true;
  return false;
}

Rational volume(const Box& box) {
  Rational v(1);
  for (const auto& i : box) v *= i.length();
  return v;
}

std::optional<Box> intersection(const Box& a, const Box& b) {
  if (a.size() != b.size()) throw GsiError(ErrorCode::InvalidInput, "box dimension mismatch");
  Box out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out[k].lo = a[k].lo < b[k].lo ? b[k].lo : a[k].lo;
    out[k].hi = a[k].hi < b[k].hi ? a[k].hi : b[k].hi;
    if (out[k].empty()) return std::nullopt;
  }
  return out;
}

bool overlaps(const Box& a, const Box& b) { return intersection(a, b).has_value(); }

bool contains(const Box& box, const RatVector& point) {
  for (std::size_t k = 0; k < box.size(); ++k)
    if (point[k] < box[k].lo || !(point[k] < box[k].hi)) return false;
  return true;
}

bool contains(const Box& outer, const Box& inner) {
  for (std::size_t k = 0; k < outer.size(); ++k)
    if (inner[k].lo < outer[k].lo || outer[k].hi < inner[k].hi) return false;
  return true;
}

Box translate(const Box& box, const RatVector& offset) {
  Box out = box;
  for (std::size_t k = 0; k < box.size(); ++k) {
    out[k].lo += offset[k];
    out[k].hi += offset[k];
  }
  return out;
}

std::vector<Box> subtract(const Box& a, const Box& b) {
  auto common = intersection(a, b);
  if (!common) return {a};
  std::vector<Box> out;
  Box rest = a;
  // Peel slabs off along each axis; what remains at the end is the intersection.
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (rest[k].lo < (*common)[k].lo) {
      Box slab = rest;
      slab[k].hi = (*common)[k].lo;
      out.push_back(slab);
    }
    if ((*common)[k].hi < rest[k].hi) {
      Box slab = rest;
      slab[k].lo = (*common)[k].hi;
      out.push_back(slab);
    }
    rest[k] = (*common)[k];
  }
  return out;
}

RatVector center(const Box& box) {
  RatVector c(box.size());
  for (std::size_t k = 0; k < box.size(); ++k) c[k] = (box[k].lo + box[k].hi) / 2;
  return c;
}

RatVector lower_corner(const Box& box) {
  RatVector c(box.size());
  for (std::size_t k = 0; k < box.size(); ++k) c[k] = box[k].lo;
  return c;
}

RatVector upper_corner(const Box& box) {
  RatVector c(box.size());
  for (std::size_t k = 0; k < box.size(); ++k) c[k] = box[k].hi;
  return c;
}

std::string to_string(const Box& box) {
  std::string s;
  for (std::size_t k = 0; k < box.size(); ++k) {
    if (k) s += " x ";
    s += "[" + to_string(box[k].lo) + ", " + to_string(box[k].hi) + ")";
  }
  return s;
}

BoxSet subtract(const BoxSet& a, const Box& b) {
  BoxSet out;
  for (const auto& box : a.boxes)
    for (auto& piece : subtract(box, b)) out.boxes.push_back(std::move(piece));
  return out;
}

BoxSet subtract(const BoxSet& a, const BoxSet& b) {
  BoxSet out = a;
  for (const auto& box : b.boxes) {
    out = subtract(out, box);
    if (out.empty()) break;
  }
  return out;
}

BoxSet unite(const BoxSet& a, const BoxSet& b) {
  BoxSet out = a;
  for (const auto& box : subtract(b, a).boxes) out.boxes.push_back(box);
  return out;
}

BoxSet intersection(const BoxSet& a, const BoxSet& b) {
  BoxSet out;
  for (const auto& x : a.boxes)
    for (const auto& y : b.boxes)
      if (auto c = intersection(x, y)) out.boxes.push_back(*c);
  return out;
}

Rational volume(const BoxSet& set) {
  Rational v(0);
  for (const auto& b : set.boxes) v += volume(b);
  return v;
}

bool contains(const BoxSet& set, const RatVector& point) {
  for (const auto& b : set.boxes)
    if (contains(b, point)) return true;
  return false;
}

std::vector<Box> wrap_periodic(const Box& box, const Rational& period) {
  if (box.size() != 1) throw GsiError(ErrorCode::InvalidInput, "periodic domains are one-dimensional");
  const Interval& i = box[0];
  if (i.empty()) return {};
  Rational len = i.length();
  if (len > period) throw GsiError(ErrorCode::InvalidInput, "interval longer than the period");
  Rational lo = i.lo - Rational(floor(i.lo / period)) * period;
  Rational hi = lo + len;
  if (hi <= period) return {Box{Interval{lo, hi}}};
  std::vector<Box> out{Box{Interval{lo, period}}};
  out.push_back(Box{Interval{Rational(0), hi - period}});
  return out;
}

}  // namespace gsi
