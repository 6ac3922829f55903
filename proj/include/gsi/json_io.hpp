#pragma once

// JSON interchange for models, lattices, generators, systems, constructions
// and reports.
//
// Scalars: exact values are ["re", "im"] rational strings, square-root
// tracked values {"sqrt": "q"}, approximations [re, im] numbers.
// Rationals are always strings "p" or "p/q".

#include <json.hpp>

#include "gsi/analysis.hpp"
#include "gsi/construct.hpp"
#include "gsi/verify.hpp"

namespace gsi::json_io {

using json = nlohmann::ordered_json;

json to_json(const Rational& q);
Rational rational_from(const json& j);
json to_json(const RatVector& v);
RatVector rat_vector_from(const json& j);

json to_json(const Scalar& s);
Scalar scalar_from(const json& j);

json to_json(const Box& box);
Box box_from(const json& j);
json to_json(const BoxSet& set);
BoxSet box_set_from(const json& j);

json to_json(const GroupModel& model);
GroupModel model_from(const json& j);

/// {"model": "finite", "modulus": "8", "dimension": 1, "basis": [["2"]]}
json to_json(const Lattice& lattice);
Lattice lattice_from(const json& j);

json to_json(const Generator& g);
Generator generator_from(const json& j);

json to_json(const GsiSystem& system);
GsiSystem system_from(const json& j);

json to_json(const CosetDecomposition& d);
CosetDecomposition decomposition_from(const json& j);

json to_json(const Spectrum& s);
json to_json(const Witness& w);
json to_json(const FrameBounds& b);
json to_json(const FrameReport& r);

/// Compares two documents: numbers within `tolerance` (relative to
/// max(1, |expected|)), rational strings exactly or within tolerance when
/// either side is approximate, everything else exactly.  Returns the JSON
/// pointer of every mismatch.
std::vector<std::string> golden_diff(const json& expected, const json& actual, double tolerance);

/// Canonical text: two-space indentation and a trailing newline.
std::string dump(const json& j);

}  // namespace gsi::json_io
