#include "gsi/json_io.hpp"

#include <cmath>
#include <stdexcept>

#include "gsi/error.hpp"

namespace gsi::json_io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw GsiError(ErrorCode::InvalidInput, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

bool flag(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) bad(std::string("field '") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

std::size_t count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) bad(std::string("field '") + key + "' must be positive");
  return v.get<std::size_t>();
}

RatMatrix rat_matrix_from(const json& j) {
  if (!j.is_array() || j.empty()) bad("basis must be a non-empty array of rows");
  RatMatrix m;
  for (const auto& row : j) m.push_back(rat_vector_from(row));
  return m;
}

json matrix_json(const RatMatrix& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(to_json(row));
  return out;
}

json values_json(const std::vector<Scalar>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_json(v));
  return out;
}

std::vector<Scalar> values_from(const json& j) {
  if (!j.is_array()) bad("values must be an array");
  std::vector<Scalar> out;
  for (const auto& v : j) out.push_back(scalar_from(v));
  return out;
}

std::string point_text(const GroupPoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + to_string(p[i]);
  return s;
}

}  // namespace

json to_json(const Rational& q) { return to_string(q); }

Rational rational_from(const json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(j.dump()));
    if (j.is_number_float()) return rational_from_double(j.get<double>());
  } catch (const std::invalid_argument&) {
  }
  bad("expected a rational, got " + j.dump());
}

json to_json(const RatVector& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(to_json(q));
  return out;
}

RatVector rat_vector_from(const json& j) {
  if (!j.is_array()) bad("expected an array of rationals");
  RatVector v;
  for (const auto& q : j) v.push_back(rational_from(q));
  return v;
}

json to_json(const Scalar& s) {
  if (s.exact()) return json::array({to_string(s.exact()->re), to_string(s.exact()->im)});
  if (s.square()) return json{{"sqrt", to_string(*s.square())}};
  return json::array({s.value().real(), s.value().imag()});
}

Scalar scalar_from(const json& j) {
  if (j.is_object()) return Scalar::sqrt_of(rational_from(field(j, "sqrt")));
  if (j.is_string()) return Scalar(rational_from(j));
  if (j.is_number()) {
    if (j.is_number_float()) return Scalar(std::complex<double>(j.get<double>(), 0.0));
    return Scalar(rational_from(j));
  }
  if (!j.is_array() || j.size() != 2) bad("a scalar is [re, im], a rational string or {\"sqrt\": q}");
  if (j[0].is_string() && j[1].is_string()) return Scalar(ComplexRational{rational_from(j[0]), rational_from(j[1])});
  if (j[0].is_number() && j[1].is_number()) return Scalar(std::complex<double>(j[0].get<double>(), j[1].get<double>()));
  bad("scalar parts must both be strings (exact) or both numbers (approximate)");
}

json to_json(const Box& box) {
  json out = json::array();
  for (const auto& iv : box) out.push_back(json::array({to_string(iv.lo), to_string(iv.hi)}));
  return out;
}

Box box_from(const json& j) {
  if (!j.is_array() || j.empty()) bad("a box is a non-empty array of [lo, hi] pairs");
  Box b;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2) bad("a box side is [lo, hi]");
    b.push_back({rational_from(iv[0]), rational_from(iv[1])});
  }
  return b;
}

json to_json(const BoxSet& set) {
  json out = json::array();
  for (const auto& b : set.boxes) out.push_back(to_json(b));
  return out;
}

BoxSet box_set_from(const json& j) {
  if (!j.is_array()) bad("a box set is an array of boxes");
  BoxSet s;
  for (const auto& b : j) s = unite(s, BoxSet{{box_from(b)}});
  return s;
}

json to_json(const GroupModel& model) {
  json out;
  switch (model.kind) {
    case GroupKind::Finite: {
      out["kind"] = "finite";
      json moduli = json::array();
      for (const auto& m : model.moduli) moduli.push_back(to_string(m));
      out["moduli"] = moduli;
      out["dual"] = model.is_dual;
      break;
    }
    case GroupKind::Integer:
      out["kind"] = "integer";
      out["dimension"] = model.dimension;
      break;
    case GroupKind::Torus:
      out["kind"] = "torus";
      out["dimension"] = model.dimension;
      break;
    case GroupKind::Real:
      out["kind"] = "real";
      out["dimension"] = model.dimension;
      out["dual"] = model.is_dual;
      break;
  }
  return out;
}

GroupModel model_from(const json& j) {
  std::string kind = text(j, "kind");
  GroupModel m;
  if (kind == "finite") {
    const json& moduli = field(j, "moduli");
    if (!moduli.is_array() || moduli.empty()) bad("finite models need a non-empty 'moduli' array");
    std::vector<Integer> ms;
    for (const auto& q : moduli) {
      Rational r = rational_from(q);
      if (!is_integer(r) || r <= 0) bad("moduli must be positive integers");
      ms.push_back(r.get_num());
    }
    m = GroupModel::finite_abelian(ms);
  } else if (kind == "integer") {
    m = GroupModel::integers(count(j, "dimension", 1));
  } else if (kind == "torus") {
    m = dual_group(GroupModel::integers(count(j, "dimension", 1)));
  } else if (kind == "real") {
    m = GroupModel::reals(count(j, "dimension", 1));
  } else {
    bad("unknown model kind '" + kind + "'");
  }
  m.is_dual = flag(j, "dual", false) && (m.kind == GroupKind::Finite || m.kind == GroupKind::Real);
  return m;
}

json to_json(const Lattice& lattice) {
  json out;
  out["model"] = lattice.ambient.name();
  if (const auto* c = std::get_if<CyclicSublattice>(&lattice.data)) out["modulus"] = to_string(c->modulus);
  out["dimension"] = lattice.dimension();
  out["basis"] = matrix_json(lattice.generator_rows());
  return out;
}

Lattice lattice_from(const json& j) {
  std::string model = text(j, "model");
  RatMatrix basis = rat_matrix_from(field(j, "basis"));
  std::size_t n = basis.size();
  for (const auto& row : basis)
    if (row.size() != n) bad("lattice bases must be square");
  if (j.contains("dimension") && j.at("dimension") != n) bad("lattice dimension does not match its basis");
  auto integral = [&] {
    IntMatrix m;
    for (const auto& row : basis) {
      IntVector r;
      for (const auto& q : row) {
        if (!is_integer(q)) bad("lattices in Z^n and Z_M need integer bases");
        r.push_back(q.get_num());
      }
      m.push_back(r);
    }
    return m;
  };
  if (model == "finite" || model == "finite-dual") {
    if (n != 1) bad("lattices in Z_M are one-dimensional");
    Rational modulus = rational_from(field(j, "modulus"));
    if (!is_integer(modulus) || modulus <= 0) bad("modulus must be a positive integer");
    return Lattice::cyclic(modulus.get_num(), integral()[0][0], model == "finite-dual");
  }
  if (model == "integer") return Lattice::integer(integral());
  if (model == "torus") return Lattice::torus(basis);
  if (model == "real" || model == "real-dual") return Lattice::real(basis, model == "real-dual");
  bad("unknown lattice model '" + model + "'");
}

json to_json(const Generator& g) {
  json out;
  if (const auto* d = std::get_if<DenseVector>(&g)) {
    out["variant"] = "dense";
    out["domain"] = d->domain == Domain::Time ? "time" : "frequency";
    out["values"] = values_json(d->values);
  } else if (const auto* s = std::get_if<FiniteSequence>(&g)) {
    out["variant"] = "sequence";
    out["support"] = json{{"start", to_string(s->start)}};
    out["values"] = values_json(s->values);
  } else {
    const auto& b = std::get<BoxSpectrum>(g);
    out["variant"] = "box_spectrum";
    json support = json::array();
    std::vector<Scalar> values;
    for (const auto& [box, c] : b.boxes) {
      support.push_back(to_json(box));
      values.push_back(c);
    }
    out["support"] = support;
    out["values"] = values_json(values);
    out["shift"] = to_json(b.shift);
  }
  return out;
}

Generator generator_from(const json& j) {
  std::string variant = text(j, "variant");
  if (variant == "dense") {
    DenseVector d;
    std::string domain = j.contains("domain") ? text(j, "domain") : "time";
    if (domain != "time" && domain != "frequency") bad("domain must be 'time' or 'frequency'");
    d.domain = domain == "time" ? Domain::Time : Domain::Frequency;
    d.values = values_from(field(j, "values"));
    return d;
  }
  if (variant == "sequence") {
    FiniteSequence s;
    if (j.contains("support")) {
      Rational start = rational_from(field(j.at("support"), "start"));
      if (!is_integer(start)) bad("sequence start must be an integer");
      s.start = start.get_num();
    }
    s.values = values_from(field(j, "values"));
    return s;
  }
  if (variant == "box_spectrum") {
    BoxSpectrum b;
    const json& support = field(j, "support");
    std::vector<Scalar> values = values_from(field(j, "values"));
    if (!support.is_array() || support.size() != values.size()) bad("box_spectrum needs one value per support box");
    for (std::size_t i = 0; i < values.size(); ++i) b.boxes.emplace_back(box_from(support[i]), values[i]);
    std::size_t n = b.boxes.empty() ? 1 : b.boxes[0].first.size();
    b.shift = j.contains("shift") ? rat_vector_from(j.at("shift")) : RatVector(n, Rational(0));
    return b;
  }
  bad("unknown generator variant '" + variant + "'");
}

json to_json(const GsiSystem& system) {
  json out;
  out["label"] = system.label;
  out["model"] = to_json(system.model);
  json layers = json::array();
  for (const auto& layer : system.layers) {
    json l;
    l["lattice"] = to_json(layer.lattice);
    l["g"] = to_json(layer.g);
    if (layer.h) l["h"] = to_json(*layer.h);
    layers.push_back(l);
  }
  out["layers"] = layers;
  if (system.tail) {
    out["tail"] = json{{"ratio", to_string(system.tail->ratio)},
                       {"generator_sq", to_string(system.tail->generator_sq)},
                       {"constant_modulus", system.tail->constant_modulus}};
  } else {
    out["tail"] = nullptr;
  }
  json claims{{"onb", system.claims.onb}, {"parseval", system.claims.parseval}};
  if (system.claims.ucp) claims["ucp"] = to_string(*system.claims.ucp);
  out["claims"] = claims;
  return out;
}

GsiSystem system_from(const json& j) {
  GsiSystem s;
  if (j.contains("label")) s.label = text(j, "label");
  s.model = model_from(field(j, "model"));
  const json& layers = field(j, "layers");
  if (!layers.is_array()) bad("layers must be an array");
  for (const auto& l : layers) {
    Layer layer{lattice_from(field(l, "lattice")), generator_from(field(l, "g")), std::nullopt};
    if (l.contains("h") && !l.at("h").is_null()) layer.h = generator_from(l.at("h"));
    s.layers.push_back(std::move(layer));
  }
  if (j.contains("tail") && !j.at("tail").is_null()) {
    const json& t = j.at("tail");
    s.tail = GeometricTail{rational_from(field(t, "ratio")), rational_from(field(t, "generator_sq")),
                           flag(t, "constant_modulus", true)};
  }
  if (j.contains("claims")) {
    const json& c = j.at("claims");
    s.claims.onb = flag(c, "onb", false);
    s.claims.parseval = flag(c, "parseval", false);
    if (c.contains("ucp") && !c.at("ucp").is_null()) s.claims.ucp = parse_ucp_status(text(c, "ucp"));
  }
  s.validate();
  return s;
}

json to_json(const CosetDecomposition& d) {
  json parts = json::array();
  for (const auto& p : d.parts) parts.push_back(json{{"shift", to_json(p.shift)}, {"sublattice", to_json(p.sublattice)}});
  return json{{"ambient", to_json(d.ambient)}, {"parts", parts}};
}

CosetDecomposition decomposition_from(const json& j) {
  CosetDecomposition d{lattice_from(field(j, "ambient")), {}};
  const json& parts = field(j, "parts");
  if (!parts.is_array()) bad("parts must be an array");
  for (const auto& p : parts) d.parts.push_back({rat_vector_from(field(p, "shift")), lattice_from(field(p, "sublattice"))});
  return d;
}

json to_json(const Spectrum& s) {
  const auto& d = s.domain();
  json domain{{"dimension", d.dimension}, {"period", d.period ? json(to_string(*d.period)) : json(nullptr)},
              {"density", to_string(d.density)}, {"discrete", d.discrete}};
  json cells = json::array();
  for (const auto& piece : s.pieces()) {
    json cell{{"box", to_json(piece.box)}};
    bool constant = piece.terms.empty() ||
                    (piece.terms.size() == 1 && std::all_of(piece.terms.begin()->first.begin(),
                                                            piece.terms.begin()->first.end(),
                                                            [](const Rational& q) { return q == 0; }));
    if (constant) {
      cell["value"] = piece.terms.empty() ? to_json(Scalar()) : to_json(piece.terms.begin()->second);
    } else {
      json terms = json::array();
      for (const auto& [kappa, c] : piece.terms) terms.push_back(json{{"kappa", to_json(kappa)}, {"coefficient", to_json(c)}});
      cell["terms"] = terms;
    }
    cells.push_back(cell);
  }
  return json{{"domain", domain}, {"cells", cells}};
}

json to_json(const Witness& w) {
  json out{{"kind", w.kind}};
  if (w.alpha) out["alpha"] = point_text(*w.alpha);
  if (w.cell) out["cell"] = to_json(*w.cell);
  if (w.layer) out["layer"] = *w.layer;
  if (w.value) out["value"] = to_json(*w.value);
  if (!w.vector.empty()) {
    json v = json::array();
    for (const auto& z : w.vector) v.push_back(json::array({z.real(), z.imag()}));
    out["vector"] = v;
  }
  if (!w.detail.empty()) out["detail"] = w.detail;
  return out;
}

json to_json(const FrameBounds& b) {
  json out{{"lower", b.lower},
           {"upper", b.upper},
           {"lower_enclosure", to_string(b.lower_enclosure)},
           {"upper_enclosure", to_string(b.upper_enclosure)},
           {"residual", b.residual},
           {"method", b.method}};
  out["bracket_ok"] = b.bracket_ok ? json(*b.bracket_ok) : json(nullptr);
  return out;
}

json to_json(const FrameReport& r) {
  json out;
  out["label"] = r.label;
  out["exit_code"] = r.exit_code();
  out["ucp"] = to_string(r.ucp);
  out["form"] = r.form;
  out["ucp_violation_evidence"] = r.ucp_violation_evidence;
  json verdicts = json::object();
  for (const auto& [name, v] : r.verdicts) {
    json ws = json::array();
    for (const auto& w : v.witnesses) ws.push_back(to_json(w));
    verdicts[name] = json{{"verdict", to_string(v.verdict)}, {"license", v.license}, {"witnesses", ws}};
  }
  out["verdicts"] = verdicts;
  out["bounds"] = r.bounds ? to_json(*r.bounds) : json(nullptr);
  json audits = json::array();
  for (const auto& a : r.audits) {
    json ws = json::array();
    for (const auto& w : a.witnesses) ws.push_back(to_json(w));
    audits.push_back(json{{"name", a.name},
                          {"inequality", a.inequality},
                          {"verdict", to_string(a.verdict)},
                          {"prefix_only", a.prefix_only},
                          {"witnesses", ws}});
  }
  out["audits"] = audits;
  out["notes"] = r.notes;
  return out;
}

namespace {

bool close(double expected, double actual, double tolerance) {
  if (std::isnan(expected) || std::isnan(actual)) return std::isnan(expected) && std::isnan(actual);
  return std::abs(expected - actual) <= tolerance * std::max(1.0, std::abs(expected));
}

void diff_into(const json& e, const json& a, double tolerance, const std::string& path, std::vector<std::string>& out) {
  if (e.is_number() && a.is_number()) {
    if (e.is_number_float() || a.is_number_float()) {
      if (!close(e.get<double>(), a.get<double>(), tolerance)) out.push_back(path);
    } else if (e != a) {
      out.push_back(path);
    }
    return;
  }
  if (e.is_string() && a.is_string()) {
    if (e == a) return;
    try {
      Rational qe = parse_rational(e.get<std::string>()), qa = parse_rational(a.get<std::string>());
      if (!close(to_double(qe), to_double(qa), tolerance)) out.push_back(path);
    } catch (const std::invalid_argument&) {
      out.push_back(path);
    }
    return;
  }
  if (e.type() != a.type()) {
    out.push_back(path);
    return;
  }
  if (e.is_array()) {
    if (e.size() != a.size()) {
      out.push_back(path);
      return;
    }
    for (std::size_t i = 0; i < e.size(); ++i) diff_into(e[i], a[i], tolerance, path + "/" + std::to_string(i), out);
    return;
  }
  if (e.is_object()) {
    for (const auto& [k, v] : e.items()) {
      if (!a.contains(k))
        out.push_back(path + "/" + k);
      else
        diff_into(v, a.at(k), tolerance, path + "/" + k, out);
    }
    for (const auto& [k, v] : a.items())
      if (!e.contains(k)) out.push_back(path + "/" + k);
    return;
  }
  if (e != a) out.push_back(path);
}

}  // namespace

std::vector<std::string> golden_diff(const json& expected, const json& actual, double tolerance) {
  std::vector<std::string> out;
  diff_into(expected, actual, tolerance, "", out);
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace gsi::json_io
