#pragma once

// Exact set algebra on half-open rational boxes [lo_1, hi_1) x ... x [lo_n, hi_n).

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "gsi/exact.hpp"

namespace gsi {

struct Interval {
  Rational lo;
  Rational hi;

  bool empty() const { return !(lo < hi); }
  Rational length() const { return empty() ? Rational(0) : Rational(hi - lo); }
  friend bool operator==(const Interval&, const Interval&) = default;
  friend std::strong_ordering operator<=>(const Interval& a, const Interval& b) {
    int c = cmp(a.lo, b.lo);
    if (c == 0) c = cmp(a.hi, b.hi);
    return c <=> 0;
  }
};

using Box = std::vector<Interval>;

bool is_empty(const Box& box);
Rational volume(const Box& box);
std::optional<Box> intersection(const Box& a, const Box& b);
/// Intersection with positive volume.
bool overlaps(const Box& a, const Box& b);
bool contains(const Box& box, const RatVector& point);
bool contains(const Box& outer, const Box& inner);
Box translate(const Box& box, const RatVector& offset);
/// a \ b as at most 2n pairwise disjoint boxes.
std::vector<Box> subtract(const Box& a, const Box& b);
RatVector center(const Box& box);
RatVector lower_corner(const Box& box);
RatVector upper_corner(const Box& box);
std::string to_string(const Box& box);

/// Finite union of pairwise disjoint boxes.
struct BoxSet {
  std::vector<Box> boxes;

  bool empty() const { return boxes.empty(); }
};

BoxSet subtract(const BoxSet& a, const Box& b);
BoxSet subtract(const BoxSet& a, const BoxSet& b);
/// Disjoint union representation of a U b.
BoxSet unite(const BoxSet& a, const BoxSet& b);
BoxSet intersection(const BoxSet& a, const BoxSet& b);
Rational volume(const BoxSet& set);
bool contains(const BoxSet& set, const RatVector& point);

/// Reduces a one-dimensional interval modulo `period` into at most two
/// pieces of [0, period).  Throws InvalidInput when longer than the period.
std::vector<Box> wrap_periodic(const Box& box, const Rational& period);

}  // namespace gsi
