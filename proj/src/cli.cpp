#include "gsi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <tuple>

#include "gsi/error.hpp"
#include "gsi/json_io.hpp"

namespace gsi::cli {

namespace {

using json_io::json;
using json_io::to_json;

constexpr int kUsage = 64;

struct RunConfig {
  std::string command;
  std::string kind;
  std::string input;
  std::string output;
  std::string csv;
  std::string golden;
  std::optional<double> tolerance;
  std::optional<long> window;
  bool exact = false;
  long n = 2;
  std::optional<std::size_t> count;
  std::string ratio;
  std::string first;
  std::string family;
  std::string alpha;
  std::string ucp;
  std::size_t samples = 256;
};

/// A usage problem found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void invalid(const std::string& what) { throw GsiError(ErrorCode::InvalidInput, what); }

json read_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError(cfg.command + " " + cfg.kind + " needs --input");
  std::ifstream in(cfg.input);
  if (!in) invalid("cannot read '" + cfg.input + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    invalid("malformed JSON in '" + cfg.input + "': " + e.what());
  }
}

/// The system either is the document or sits under "system".
const json& system_doc(const json& doc) { return doc.contains("system") ? doc.at("system") : doc; }

RatVector parse_point(const std::string& text) {
  RatVector p;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      p.push_back(parse_rational(part));
    } catch (const std::invalid_argument&) {
      throw UsageError("malformed point '" + text + "'");
    }
  }
  if (p.empty()) throw UsageError("empty point");
  return p;
}

Rational parse_flag_rational(const std::string& text, const char* name) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("malformed ") + name + " '" + text + "'");
  }
}

GroupPoint difference_point(const GroupPoint& a, const GroupPoint& b) {
  GroupPoint d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

std::string point_text(const GroupPoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + to_string(p[i]);
  return s;
}

std::string scalar_text(const Scalar& s) {
  if (auto q = s.exact_real()) return to_string(*q);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.value().real());
  return buf;
}

TestFunction test_function(const json& doc, const GroupModel& model) {
  if (doc.contains("test_function")) {
    const json& t = doc.at("test_function");
    TestFunction f{json_io::generator_from(t.at("f")), {}};
    if (t.contains("blind_spot"))
      for (const auto& p : t.at("blind_spot")) f.blind_spot.push_back(json_io::rat_vector_from(p));
    validate_test_function(f, model);
    return f;
  }
  if (model.kind != GroupKind::Finite && model.kind != GroupKind::Integer)
    invalid("this model has no default test function; supply \"test_function\"");
  return {unit_impulse(model), {}};
}

VerifyOptions verify_options(const RunConfig& cfg, const json& doc) {
  VerifyOptions o;
  if (cfg.tolerance) o.tolerance = *cfg.tolerance;
  if (doc.contains("region")) o.region = json_io::box_from(doc.at("region"));
  if (!cfg.ucp.empty()) o.ucp = parse_ucp_status(cfg.ucp);
  return o;
}

json bandwidth_json(const Bandwidth& b) {
  json out{{"prefix", to_string(b.prefix)}};
  out["total"] = b.total ? json(to_string(*b.total)) : json(nullptr);
  out["infinite"] = b.infinite;
  out["value"] = b.infinite ? json("inf") : b.total ? json(to_string(*b.total)) : json(to_string(b.prefix));
  return out;
}

json tail_json(const std::optional<TailValue>& t) {
  if (!t) return nullptr;
  return json{{"value", to_json(t->value)}, {"exact", t->exact}};
}

// ------------------------------------------------------------ construct

json shannon(const RunConfig& cfg) {
  json doc = read_input(cfg);
  GroupModel model = json_io::model_from(doc.at("model"));
  std::vector<Lattice> lattices;
  for (const auto& l : doc.at("lattices")) lattices.push_back(json_io::lattice_from(l));
  FrequencyTiling tiling;
  if (doc.contains("points")) {
    for (const auto& pts : doc.at("points")) tiling.tiles.push_back(point_set(pts.get<std::vector<long>>()));
  } else {
    for (const auto& t : doc.at("tiles")) tiling.tiles.push_back(json_io::box_set_from(t));
  }
  ShannonOptions options;
  if (doc.contains("region")) options.region = json_io::box_from(doc.at("region"));
  GsiSystem system = shannon_generators(model, lattices, tiling, options);
  json out = to_json(system);
  json tiles = json::array();
  for (const auto& t : disjointify_tiles(tiling).tiles) tiles.push_back(to_json(t));
  out["certificate"] = json{{"tiles", tiles}, {"onb", system.claims.onb}};
  return out;
}

json br_certificate(const BrPartition& p) {
  json taus = json::array();
  for (const auto& t : p.taus) taus.push_back(to_string(t));
  json out{{"N", p.n}, {"taus", taus}, {"disjoint", p.disjoint}};
  out["disjoint_witness"] =
      p.disjoint_witness ? json::array({to_string(p.disjoint_witness->first), to_string(p.disjoint_witness->second)})
                         : json(nullptr);
  out["window"] = to_string(p.window);
  out["covered"] = p.covered;
  json uncovered = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(p.uncovered.size(), 16); ++i)
    uncovered.push_back(to_string(p.uncovered[i]));
  out["uncovered"] = uncovered;
  json closed = json::array();
  for (const auto& [v, ok] : p.closed_form) closed.push_back(json{{"value", to_string(v)}, {"equals_next_tau", ok}});
  out["closed_form"] = closed;
  return out;
}

json br(const RunConfig& cfg) {
  std::size_t m = cfg.count.value_or(20);
  std::optional<Integer> window;
  if (cfg.window) window = Integer(*cfg.window);
  json out = to_json(br_system(cfg.n, m));
  out["certificate"] = br_certificate(br_partition(cfg.n, m, window));
  return out;
}

json refine(const RunConfig& cfg) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  std::vector<CosetDecomposition> decompositions;
  if (doc.contains("decompositions")) {
    for (const auto& d : doc.at("decompositions")) decompositions.push_back(json_io::decomposition_from(d));
  } else if (doc.contains("chains")) {
    const json& chains = doc.at("chains");
    if (chains.size() != system.layers.size()) invalid("one chain per layer is required");
    for (std::size_t j = 0; j < chains.size(); ++j) {
      std::vector<Lattice> chain;
      for (const auto& l : chains[j]) chain.push_back(json_io::lattice_from(l));
      decompositions.push_back(coset_refinement(system.layers[j].lattice, chain));
    }
  } else {
    invalid("refine needs \"decompositions\" or \"chains\"");
  }
  json out = to_json(build_refined_system(system, decompositions));
  json ds = json::array();
  for (const auto& d : decompositions) ds.push_back(to_json(d));
  out["certificate"] = json{{"decompositions", ds}};
  return out;
}

json cover_json(const CubeCover& c) {
  json shifts = json::array();
  for (const auto& s : c.shifts) shifts.push_back(s ? to_json(*s) : json(nullptr));
  json sides = json::array(), rounded = json::array();
  for (const auto& s : c.sides) sides.push_back(to_string(s));
  for (const auto& s : c.rounded) rounded.push_back(to_string(s));
  return json{{"sides", sides},       {"rounded", rounded},
              {"shifts", shifts},     {"target", to_json(c.target)},
              {"covered", c.covered}, {"remainder_volume", to_string(c.remainder_volume)}};
}

/// Shannon system on R^n whose tiles are the placed cubes.
GsiSystem cube_system(const std::vector<Lattice>& lattices, const CubeCover& cover) {
  FrequencyTiling tiling;
  for (std::size_t j = 0; j < lattices.size(); ++j) {
    BoxSet tile;
    if (j < cover.shifts.size() && cover.shifts[j]) {
      Box b;
      for (const auto& lo : *cover.shifts[j]) b.push_back({lo, lo + cover.sides[j]});
      tile.boxes.push_back(b);
    }
    tiling.tiles.push_back(tile);
  }
  GroupModel model = GroupModel::reals(cover.target.size());
  return shannon_generators(model, lattices, tiling, ShannonOptions{cover.target});
}

json cubes(const RunConfig& cfg) {
  json doc = read_input(cfg);
  std::vector<Rational> sides;
  for (const auto& s : doc.at("sides")) sides.push_back(json_io::rational_from(s));
  CubeCover cover = cube_cover(sides, json_io::box_from(doc.at("target")));
  if (!doc.contains("lattices")) return json{{"cover", cover_json(cover)}};
  std::vector<Lattice> lattices;
  for (const auto& l : doc.at("lattices")) lattices.push_back(json_io::lattice_from(l));
  if (lattices.size() != sides.size()) invalid("one lattice per cube side is required");
  json out = to_json(cube_system(lattices, cover));
  out["certificate"] = json{{"cover", cover_json(cover)}};
  return out;
}

json near_iso(const RunConfig& cfg) {
  json doc = read_input(cfg);
  std::vector<RatMatrix> matrices;
  for (const auto& m : doc.at("matrices")) {
    RatMatrix c;
    for (const auto& row : m) c.push_back(json_io::rat_vector_from(row));
    matrices.push_back(c);
  }
  Rational bound = json_io::rational_from(doc.at("bound"));
  auto tiles = near_iso_tiles(matrices, bound);
  json ts = json::array();
  std::vector<Rational> sides;
  for (const auto& t : tiles) {
    ts.push_back(json{{"sigma_min_lower", to_string(t.sigma_min_lower)},
                      {"sigma_min", t.sigma_min},
                      {"sigma_max", t.sigma_max},
                      {"cube", to_json(t.cube)},
                      {"inclusion_certified", t.inclusion_certified}});
    sides.push_back(t.cube[0].hi - t.cube[0].lo);
  }
  if (!doc.contains("target")) return json{{"tiles", ts}};
  CubeCover cover = cube_cover(sides, json_io::box_from(doc.at("target")));
  std::vector<Lattice> lattices;
  for (const auto& c : matrices) lattices.push_back(Lattice::real(transpose(c)));
  json out = to_json(cube_system(lattices, cover));
  out["certificate"] = json{{"tiles", ts}, {"cover", cover_json(cover)}};
  return out;
}

json small_bw_certificate(const SmallBandwidthOnb& onb) {
  json refinements = json::array();
  for (const auto& r : onb.refinements) refinements.push_back(to_json(r));
  json uncovered = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(onb.uncovered.size(), 16); ++i)
    uncovered.push_back(point_text(onb.uncovered[i]));
  json out{{"refinements", refinements},
           {"chain_bandwidth", to_string(onb.chain_bandwidth)},
           {"system_bandwidth", to_string(onb.system_bandwidth)},
           {"bound", to_string(onb.bound)},
           {"disjoint", onb.disjoint}};
  out["window"] = onb.window ? json(to_string(*onb.window)) : json(nullptr);
  out["covered"] = onb.covered;
  out["uncovered"] = uncovered;
  return out;
}

json small_bw(const RunConfig& cfg) {
  Lattice base = Lattice::integer_multiples(1);
  std::vector<Lattice> chain;
  std::optional<Integer> window;
  if (cfg.window) window = Integer(*cfg.window);
  if (!cfg.input.empty()) {
    json doc = read_input(cfg);
    base = json_io::lattice_from(doc.at("base"));
    for (const auto& l : doc.at("chain")) chain.push_back(json_io::lattice_from(l));
    if (doc.contains("window") && !window) window = json_io::rational_from(doc.at("window")).get_num();
  } else {
    if (cfg.n < 2) throw UsageError("--N must be at least 2");
    Integer step = 1;
    for (std::size_t j = 0; j < cfg.count.value_or(12); ++j) {
      step *= cfg.n;
      chain.push_back(Lattice::integer_multiples(step));
    }
  }
  SmallBandwidthOnb onb = small_bandwidth_onb(base, chain, window);
  json out = to_json(onb.system);
  out["certificate"] = small_bw_certificate(onb);
  return out;
}

// -------------------------------------------------------------- analyze

json calderon(const RunConfig& cfg, std::ostream& err) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  Spectrum c = calderon_spectrum(system).simplified();
  json s = to_json(c);
  json out{{"op", "calderon"}, {"cells", s.at("cells")}, {"tail", tail_json(calderon_tail(system))}};
  if (!cfg.csv.empty()) {
    if (system.model.dimension != 1) invalid("CSV curves are one-dimensional");
    const SpectralDomain& d = c.domain();
    std::vector<Rational> omegas;
    if (d.discrete) {
      for (Integer k = 0; k < *d.period; ++k) omegas.push_back(Rational(k));
    } else {
      Rational lo = 0, hi = 1;
      if (d.period) {
        hi = *d.period;
      } else if (doc.contains("region")) {
        Box r = json_io::box_from(doc.at("region"));
        lo = r[0].lo;
        hi = r[0].hi;
      } else if (!c.pieces().empty()) {
        lo = c.pieces().front().box[0].lo;
        hi = c.pieces().front().box[0].hi;
        for (const auto& p : c.pieces()) {
          lo = std::min(lo, p.box[0].lo);
          hi = std::max(hi, p.box[0].hi);
        }
      }
      for (std::size_t k = 0; k < cfg.samples; ++k) omegas.push_back(lo + (hi - lo) * ratio(Integer(static_cast<unsigned long>(k)), Integer(static_cast<unsigned long>(cfg.samples))));
    }
    std::ofstream csv(cfg.csv);
    if (!csv) invalid("cannot write '" + cfg.csv + "'");
    csv << "omega,value\n";
    for (const auto& w : omegas) csv << to_string(w) << "," << scalar_text(calderon_sum(system, {w})) << "\n";
    err << "wrote " << omegas.size() << " rows to " << cfg.csv << "\n";
  }
  return out;
}

json talpha_json(const TAlpha& t) {
  json out{{"op", "t_alpha"}, {"alpha", point_text(t.alpha)}, {"layers", t.layers}};
  out["cells"] = to_json(t.values.simplified()).at("cells");
  out["tail"] = tail_json(t.tail);
  return out;
}

json talpha(const RunConfig& cfg) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  SystemSpectra spectra = prepare(system);
  if (!cfg.alpha.empty()) return talpha_json(t_alpha(system, spectra, parse_point(cfg.alpha)));
  json results = json::array();
  for (const auto& a : relevant_alphas(system, spectra)) results.push_back(talpha_json(t_alpha(system, spectra, a)));
  return json{{"op", "t_alpha"}, {"results", results}};
}

json bandwidth_cmd(const RunConfig& cfg) {
  json out{{"op", "bandwidth"}};
  if (!cfg.family.empty()) {
    if (cfg.family != "geometric") throw UsageError("unknown family '" + cfg.family + "'");
    if (cfg.ratio.empty()) throw UsageError("--family geometric needs --ratio");
    Rational ratio = parse_flag_rational(cfg.ratio, "--ratio");
    Rational first = cfg.first.empty() ? ratio : parse_flag_rational(cfg.first, "--first");
    if (first <= 0 || ratio <= 0) throw UsageError("--ratio and --first must be positive");
    out["family"] = json{{"kind", "geometric"}, {"first", to_string(first)}, {"ratio", to_string(ratio)}};
    out.update(bandwidth_json(geometric_bandwidth(first, ratio)));
    return out;
  }
  json doc = read_input(cfg);
  if (doc.contains("lattices")) {
    std::vector<Lattice> lattices;
    for (const auto& l : doc.at("lattices")) lattices.push_back(json_io::lattice_from(l));
    out.update(bandwidth_json(bandwidth(lattices)));
  } else {
    out.update(bandwidth_json(bandwidth(json_io::system_from(system_doc(doc)))));
  }
  return out;
}

json mean_cmd(const RunConfig& cfg) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  TestFunction f = test_function(doc, system.model);
  TrigPolynomial w = w_total(system, f);
  json out{{"op", "mean"}, {"function", "w_total"}};
  MeanEstimate exact = mean_exact(w);
  out["exact"] = exact.exact ? to_json(*exact.exact) : json(nullptr);
  if (!cfg.exact) {
    std::vector<long> schedule;
    long top = cfg.window.value_or(4096);
    for (long n = 16; n <= top; n *= 2) schedule.push_back(n);
    MeanEstimate est = mean_windowed([&](const GroupPoint& x) { return w.evaluate(x).value(); }, system.model, schedule);
    json windows = json::array();
    for (const auto& [n, v] : est.windowed) windows.push_back(json::array({n, v.real(), v.imag()}));
    out["windowed"] = windows;
    out["converged"] = est.converged;
  }
  return out;
}

json ucp_cmd(const RunConfig& cfg) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  TestFunction f = test_function(doc, system.model);
  std::size_t m = cfg.count.value_or(system.layers.size());
  m = std::min(m, system.layers.size());
  std::vector<std::size_t> prefixes;
  for (std::size_t k = 1; k <= m; ++k) prefixes.push_back(k);
  std::optional<Scalar> target;
  if (system.claims.onb || system.claims.parseval) target = norm_squared(f.f, system.model);
  UcpReport r = ucp_residual(system, f, prefixes, target);
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(json{{"prefix", e.prefix}, {"residual", to_json(e.residual)}});
  json out{{"op", "ucp"}, {"target", to_json(r.target)}, {"method", r.method}, {"entries", entries}};
  out["limit"] = r.limit ? to_json(*r.limit) : json(nullptr);
  out["status"] = to_string(r.status);
  return out;
}

json lic_json(const GsiSystem& system, const TestFunction& f, std::size_t m) {
  json sums = json::array(), partial = json::array();
  Scalar total;
  for (std::size_t j = 0; j < m; ++j) {
    Scalar s = lic_layer_sum(system, f, j);
    total += s;
    sums.push_back(to_json(s));
    partial.push_back(to_json(total));
  }
  return json{{"layer_sums", sums}, {"partial_sums", partial}};
}

json lic_cmd(const RunConfig& cfg) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  TestFunction f = test_function(doc, system.model);
  json out{{"op", "lic"}};
  out.update(lic_json(system, f, std::min(cfg.count.value_or(system.layers.size()), system.layers.size())));
  return out;
}

// --------------------------------------------------------------- verify

void print_table(const FrameReport& r, std::ostream& err) {
  err << "report " << (r.label.empty() ? std::string("(unlabelled)") : r.label) << "  ucp=" << to_string(r.ucp)
      << "\n";
  for (const auto& [name, v] : r.verdicts)
    err << "  " << std::left << std::setw(14) << to_string(v.verdict) << std::setw(14) << name << v.license << "\n";
  for (const auto& a : r.audits)
    err << "  " << std::left << std::setw(14) << to_string(a.verdict) << std::setw(14) << a.name << a.inequality
        << (a.prefix_only ? " (prefix only)" : "") << "\n";
  for (const auto& n : r.notes) err << "  note: " << n << "\n";
}

std::pair<json, int> verify_cmd(const RunConfig& cfg, std::ostream& err) {
  json doc = read_input(cfg);
  GsiSystem system = json_io::system_from(system_doc(doc));
  VerifyOptions options = verify_options(cfg, doc);
  FrameReport r;
  if (cfg.kind == "parseval") {
    r = check_parseval(system, options);
  } else if (cfg.kind == "dual") {
    r = check_dual_pair(system, options);
  } else if (cfg.kind == "audit") {
    std::optional<FrameBounds> bounds;
    if (doc.contains("bounds")) {
      FrameBounds b;
      b.lower_enclosure = json_io::rational_from(doc.at("bounds").at("lower"));
      b.upper_enclosure = json_io::rational_from(doc.at("bounds").at("upper"));
      b.lower = to_double(b.lower_enclosure);
      b.upper = to_double(b.upper_enclosure);
      b.method = "supplied";
      bounds = b;
    }
    r = audit_necessary(system, bounds, options);
  } else {
    r = independence_gate(system, options);
  }
  print_table(r, err);
  return {to_json(r), r.exit_code()};
}

// ---------------------------------------------------------------- repro

json verdict_brief(const FrameReport& r) {
  json out{{"exit_code", r.exit_code()}, {"ucp", to_string(r.ucp)}};
  json v = json::object();
  for (const auto& [name, e] : r.verdicts) v[name] = to_string(e.verdict);
  out["verdicts"] = v;
  json audits = json::array();
  for (const auto& a : r.audits)
    audits.push_back(json{{"name", a.name}, {"verdict", to_string(a.verdict)}, {"inequality", a.inequality}});
  out["audits"] = audits;
  out["ucp_violation_evidence"] = r.ucp_violation_evidence;
  return out;
}

bool exact_equals(const Scalar& s, const Rational& q) {
  auto e = s.exact_real();
  return e && *e == q;
}

json repro_br(const RunConfig& cfg) {
  long n = cfg.n;
  if (n < 2) throw UsageError("--N must be at least 2");
  std::size_t m = cfg.count.value_or(20);
  GsiSystem system = br_system(n, m);
  BrPartition partition = br_partition(n, m);
  TestFunction f{unit_impulse(system.model), {}};
  const GroupPoint zero{Rational(0)};
  json checks;

  json d = json::array();
  bool d_ok = true;
  for (std::size_t j = 0; j < m; ++j) {
    Scalar c = d_coefficient(system, f, j, zero);
    d_ok = d_ok && exact_equals(c, pow(Rational(n), -static_cast<long>(j + 1)));
    d.push_back(to_json(c));
  }
  checks["d_j0_equals_N_pow_minus_j"] = d_ok;

  TAlpha t0 = t_alpha(system, zero);
  Rational expected_t0 = Rational(1) / Rational(n - 1);
  json cells = json::array();
  bool t0_ok = t0.tail && t0.tail->exact;
  Spectrum t0_cells = t0.values.simplified();
  for (const auto& piece : t0_cells.pieces()) {
    Scalar stored = piece.terms.empty() ? Scalar() : piece.terms.begin()->second;
    Scalar total = stored + (t0.tail ? t0.tail->value : Scalar());
    t0_ok = t0_ok && piece.terms.size() <= 1 && exact_equals(total, expected_t0);
    cells.push_back(json{{"box", to_json(piece.box)}, {"stored", to_json(stored)}, {"total", to_json(total)}});
  }
  checks["t0_equals_1_over_N_minus_1"] = t0_ok;

  std::vector<std::size_t> prefixes;
  for (std::size_t k = 1; k <= m; ++k) prefixes.push_back(k);
  UcpReport ucp = ucp_residual(system, f, prefixes, Scalar(Rational(1)));
  json residuals = json::array();
  bool res_ok = true;
  for (const auto& e : ucp.entries) {
    Rational expected = 1 - (1 - pow(Rational(n), -static_cast<long>(e.prefix))) / Rational(n - 1);
    res_ok = res_ok && exact_equals(e.residual, expected);
    residuals.push_back(json{{"prefix", e.prefix}, {"residual", to_json(e.residual)}});
  }
  checks["residual_means_closed_form"] = res_ok;
  checks["residual_limit"] = ucp.limit && exact_equals(*ucp.limit, Rational(n - 2, n - 1));

  json lic = lic_json(system, f, m);
  // Every layer contributes the same positive amount and the tail layers
  // repeat it, so the partial sums grow without bound.
  bool constant = true;
  Scalar first = lic_layer_sum(system, f, 0);
  for (std::size_t j = 1; j < m; ++j) constant = constant && identical(lic_layer_sum(system, f, j), first);
  bool divergent = constant && first.value().real() > 0 && system.tail && system.tail->constant_modulus;
  lic["divergent"] = divergent;
  checks["lic_divergent"] = divergent;

  // The t_alpha equations enumerate every dual point of the stored layers;
  // verify on the longest prefix whose dual points stay within the cap.
  std::size_t verify_layers = 1;
  for (Integer points = n; verify_layers < m;) {
    Integer next = points + pow(Integer(n), verify_layers + 1);
    if (next > 1 << 14) break;
    points = next;
    ++verify_layers;
  }
  FrameReport parseval = check_parseval(br_system(n, verify_layers));
  FrameReport audit = audit_necessary(system);
  if (n == 2) {
    checks["parseval_pass"] = parseval.exit_code() == 0;
    checks["audits_pass"] = audit.exit_code() == 0;
    checks["closed_form_matches"] =
        std::all_of(partition.closed_form.begin(), partition.closed_form.end(), [](const auto& p) { return p.second; });
  } else {
    checks["parseval_fails"] = parseval.exit_code() == 2;
    checks["ucp_violation_flagged"] = audit.ucp_violation_evidence;
  }
  checks["partition_disjoint"] = partition.disjoint;

  json out{{"repro", "example-3.11"}, {"N", n}, {"count", m}};
  out["partition"] = br_certificate(partition);
  out["d_j0"] = d;
  out["t0"] = json{{"cells", cells}, {"tail", tail_json(t0.tail)}};
  out["ucp_residual"] = json{{"entries", residuals},
                             {"limit", ucp.limit ? to_json(*ucp.limit) : json(nullptr)},
                             {"status", to_string(ucp.status)}};
  out["lic"] = lic;
  out["parseval"] = verdict_brief(parseval);
  out["parseval"]["layers"] = verify_layers;
  out["audit"] = verdict_brief(audit);
  out["checks"] = checks;
  return out;
}

/// The k-th element of Z in the order 0, 1, -1, 2, -2, ...
Integer spiral(std::size_t k) {
  Integer h = static_cast<unsigned long>((k + 1) / 2);
  return k % 2 ? h : Integer(-h);
}

json repro_refinement(const RunConfig& cfg) {
  std::size_t m = cfg.count.value_or(20);
  json checks;
  GroupModel reals = GroupModel::reals(1);
  Box unit{{Rational(0), Rational(1)}};

  // The single lattice Z on R with a Parseval-normalised Paley-Wiener generator.
  GsiSystem single;
  single.label = "single lattice Z on R";
  single.model = reals;
  single.layers.push_back({Lattice::real({{Rational(1)}}), BoxSpectrum{{{unit, Scalar(Rational(1))}}, {Rational(0)}},
                           std::nullopt});
  FrameBounds claimed;
  claimed.lower = claimed.upper = 1;
  claimed.lower_enclosure = claimed.upper_enclosure = 1;
  claimed.method = "supplied";
  VerifyOptions options;
  options.region = unit;
  FrameReport single_audit = audit_necessary(single, claimed, options);
  bool obstructed = false;
  for (const auto& a : single_audit.audits)
    if (a.name == "finite_family_obstruction") obstructed = a.verdict == Verdict::Fail;
  checks["single_lattice_has_no_frame_generators"] = obstructed;

  // Z as the disjoint union of tau_j + 2^j Z: the refinement witness.
  BrPartition partition = br_partition(2, m);
  checks["refinement_disjoint"] = partition.disjoint;
  checks["refinement_covers_window"] = partition.covered;

  Bandwidth bw_l = geometric_bandwidth(Rational(2), Rational(2));
  Bandwidth bw_g = bandwidth(std::vector<Lattice>{Lattice::real({{Rational(1)}})});
  checks["bandwidth_refined_is_1"] = bw_l.total && *bw_l.total == 1;

  // Orthonormal basis over (2^n Z)_n: the constant system (Z)_{alpha in Z}
  // with g_alpha^ = 1_{alpha + [0,1)}, refined along round-robin chains.
  // Layer n goes to alpha_{a} with (a, k) the n-th pair of the diagonal
  // enumeration, so every 2^n Z is used exactly once.
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::pair<std::size_t, std::size_t>> assignment;
  for (std::size_t diag = 0; assignment.size() < m; ++diag)
    for (std::size_t a = 0; a <= diag && assignment.size() < m; ++a) assignment.emplace_back(a, diag - a);
  for (std::size_t idx = 0; idx < m; ++idx) {
    std::size_t a = assignment[idx].first;
    if (chains.size() <= a) chains.resize(a + 1);
    chains[a].push_back(idx + 1);
  }
  GsiSystem refined;
  refined.label = "refinement of (Z)_{alpha in Z} over (2^n Z)";
  refined.model = reals;
  json layers = json::array();
  bool disjoint = true, claim = true;
  std::vector<json> by_layer(m);
  for (std::size_t a = 0; a < chains.size(); ++a) {
    std::vector<Lattice> chain;
    for (std::size_t n : chains[a]) chain.push_back(Lattice::integer_multiples(pow(Integer(2), n)));
    CosetDecomposition d = coset_refinement(Lattice::integer_multiples(1), chain);
    for (std::size_t i = 0; i < d.parts.size(); ++i)
      for (std::size_t k = i + 1; k < d.parts.size(); ++k)
        disjoint = disjoint &&
                   cosets_disjoint(d.parts[i].shift, d.parts[i].sublattice, d.parts[k].shift, d.parts[k].sublattice);
    // The first k enumerated integers lie in the first k cosets.
    for (std::size_t k = 1; k <= d.parts.size(); ++k) {
      GroupPoint h{Rational(spiral(k - 1))};
      bool in = false;
      for (std::size_t i = 0; i < k; ++i) in = in || d.parts[i].sublattice.contains(difference_point(h, d.parts[i].shift));
      claim = claim && in;
    }
    Integer alpha = spiral(a);
    for (std::size_t i = 0; i < chains[a].size(); ++i) {
      std::size_t n = chains[a][i];
      by_layer[n - 1] = json{{"n", n}, {"alpha", to_string(alpha)}, {"gamma", to_string(d.parts[i].shift[0])}};
    }
  }
  for (auto& l : by_layer) layers.push_back(l);
  checks["onb_cosets_disjoint"] = disjoint;
  checks["onb_enumeration_covered"] = claim;
  Rational prefix_bw = 0;
  for (std::size_t n = 1; n <= m; ++n) prefix_bw += Rational(1) / Rational(pow(Integer(2), n));

  json out{{"repro", "example-4.6"}, {"count", m}};
  out["single_lattice"] = json{{"bandwidth", bandwidth_json(bw_g)}, {"audit", verdict_brief(single_audit)}};
  out["refinement"] = br_certificate(partition);
  out["refined_bandwidth"] = bandwidth_json(bw_l);
  out["onb_layers"] = layers;
  out["onb_prefix_bandwidth"] = to_string(prefix_bw);
  out["checks"] = checks;
  return out;
}

json repro_perturbation(const RunConfig& cfg) {
  std::size_t m = cfg.count.value_or(20);
  json checks;
  Bandwidth bw = geometric_bandwidth(Rational(2), Rational(2));
  checks["bandwidth_dyadic_is_1"] = bw.total && *bw.total == 1;

  // |2^j - c_j| < 1 gives 1/c_j < 1/(2^j - 1); sum_{j > m} 1/(2^j - 1) <= 2^{1-m}.
  Rational prefix = 0;
  for (std::size_t j = 1; j <= m; ++j) prefix += Rational(1) / Rational(pow(Integer(2), j) - 1);
  Rational tail = Rational(2) / Rational(pow(Integer(2), m));
  Rational upper = prefix + tail;
  checks["perturbed_bandwidth_at_most_2"] = upper <= 2;

  // A rational instance within the perturbation radius.
  std::vector<Lattice> sample;
  for (std::size_t j = 1; j <= m; ++j) {
    Rational c = Rational(pow(Integer(2), j)) + ratio(j % 2 ? 1 : -1, 2);
    sample.push_back(Lattice::real({{c}}));
  }
  Bandwidth sample_bw = bandwidth(sample);
  checks["sample_within_bound"] = sample_bw.prefix < prefix;

  // Integer analogue: the dyadic duals are nested, hence dependent.
  std::vector<Lattice> dyadic;
  for (std::size_t j = 1; j <= 4; ++j) dyadic.push_back(Lattice::integer_multiples(pow(Integer(2), j)));
  checks["dyadic_duals_dependent"] = !duals_independent(dyadic);

  json out{{"repro", "example-5.8"}, {"count", m}};
  out["dyadic_bandwidth"] = bandwidth_json(bw);
  out["perturbed_bound"] = json{{"prefix", to_string(prefix)},
                                {"tail_bound", to_string(tail)},
                                {"upper", to_string(upper)},
                                {"inequality", "BW <= " + to_string(upper) + " <= 2 < inf = mu(R^)"}};
  out["sample_bandwidth_prefix"] = to_string(sample_bw.prefix);
  out["checks"] = checks;
  return out;
}

json repro_intersections(const RunConfig& cfg) {
  std::size_t m = cfg.count.value_or(5);
  if (m > 6) throw UsageError("--count is at most 6 here");
  json checks;
  // Fermat numbers 2^(2^k) + 1: pairwise coprime, reciprocal sum < 1.
  std::vector<Integer> c;
  for (std::size_t k = 0; k < m; ++k) c.push_back(pow(Integer(2), 1UL << k) + 1);
  std::vector<Lattice> gammas;
  for (const auto& v : c) gammas.push_back(Lattice::integer_multiples(v));
  checks["duals_independent"] = duals_independent(gammas);

  Rational prefix = bandwidth(gammas).prefix;
  // F_{k+1} > 2 F_k, so the remaining reciprocals sum to at most 2 / F_m.
  Rational tail = Rational(2) / Rational(pow(Integer(2), 1UL << m) + 1);
  checks["bandwidth_below_1"] = prefix + tail < 1;

  // Any ONB over these lattices has the box shape; laying the boxes end to end
  // leaves [sum, 1) uncovered.
  GsiSystem shaped;
  shaped.label = "box-shaped generators over c_j Z";
  shaped.model = GroupModel::integers(1);
  Rational at = 0;
  for (std::size_t j = 0; j < m; ++j) {
    Rational len = Rational(1) / Rational(c[j]);
    shaped.layers.push_back(
        {gammas[j], BoxSpectrum{{{{{at, at + len}}, Scalar::sqrt_of(Rational(c[j]))}}, {Rational(0)}}, std::nullopt});
    at += len;
  }
  shaped.claims.onb = true;
  FrameReport parseval = check_parseval(shaped);
  FrameReport gate = independence_gate(shaped);
  checks["shaped_parseval_fails"] = parseval.exit_code() == 2;
  checks["gate_licenses_ucp"] = gate.verdicts.count("independence") &&
                                gate.verdicts.at("independence").verdict == Verdict::Pass;

  // Lambda_j = intersection of Gamma_1..Gamma_j: strictly decreasing, inside Gamma_j.
  std::vector<Lattice> lambdas;
  json lam = json::array();
  bool strict = true, inside = true;
  for (std::size_t j = 0; j < m; ++j) {
    Lattice l = j == 0 ? gammas[0] : intersect(lambdas.back(), gammas[j]);
    if (j > 0) strict = strict && lattice_index(l, lambdas.back()) > 1;
    inside = inside && lattice_index(l, gammas[j]) >= 1;
    lambdas.push_back(l);
    lam.push_back(to_string(covolume(l)));
  }
  checks["lambda_strictly_decreasing"] = strict;
  checks["lambda_inside_gamma"] = inside;

  CosetDecomposition d = coset_refinement(Lattice::integer_multiples(1), lambdas);
  bool disjoint = true, claim = true;
  for (std::size_t i = 0; i < d.parts.size(); ++i)
    for (std::size_t k = i + 1; k < d.parts.size(); ++k)
      disjoint = disjoint &&
                 cosets_disjoint(d.parts[i].shift, d.parts[i].sublattice, d.parts[k].shift, d.parts[k].sublattice);
  for (std::size_t k = 1; k <= d.parts.size(); ++k) {
    GroupPoint h{Rational(spiral(k - 1))};
    bool in = false;
    for (std::size_t i = 0; i < k; ++i) in = in || d.parts[i].sublattice.contains(difference_point(h, d.parts[i].shift));
    claim = claim && in;
  }
  checks["refinement_disjoint"] = disjoint;
  checks["refinement_enumeration_covered"] = claim;

  json cs = json::array();
  for (const auto& v : c) cs.push_back(to_string(v));
  json shifts = json::array();
  for (const auto& p : d.parts) shifts.push_back(to_string(p.shift[0]));
  json out{{"repro", "example-5.9"}, {"count", m}, {"c", cs}};
  out["bandwidth"] = json{{"prefix", to_string(prefix)},
                          {"tail_bound", to_string(tail)},
                          {"inequality", "BW <= " + to_string(prefix + tail) + " < 1 = mu(T)"}};
  out["shaped_parseval"] = verdict_brief(parseval);
  out["gate"] = verdict_brief(gate);
  out["lambda_covolumes"] = lam;
  out["lambda_shifts"] = shifts;
  out["checks"] = checks;
  return out;
}

int checks_exit(const json& report) {
  for (const auto& [k, v] : report.at("checks").items())
    if (!v.get<bool>()) return 2;
  return 0;
}

// ------------------------------------------------------------ dispatch

void emit(const RunConfig& cfg, const json& j, std::ostream& out) {
  std::string text = json_io::dump(j);
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) invalid("cannot write '" + cfg.output + "'");
  file << text;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  json result;
  int code = 0;
  if (cfg.command == "construct") {
    if (cfg.kind == "shannon") result = shannon(cfg);
    else if (cfg.kind == "br") result = br(cfg);
    else if (cfg.kind == "refine") result = refine(cfg);
    else if (cfg.kind == "cubes") result = cubes(cfg);
    else if (cfg.kind == "small-bw-onb") result = small_bw(cfg);
    else result = near_iso(cfg);
  } else if (cfg.command == "analyze") {
    if (cfg.kind == "calderon") result = calderon(cfg, err);
    else if (cfg.kind == "talpha") result = talpha(cfg);
    else if (cfg.kind == "bandwidth") result = bandwidth_cmd(cfg);
    else if (cfg.kind == "mean") result = mean_cmd(cfg);
    else if (cfg.kind == "ucp") result = ucp_cmd(cfg);
    else result = lic_cmd(cfg);
  } else if (cfg.command == "verify") {
    std::tie(result, code) = verify_cmd(cfg, err);
  } else {
    if (cfg.kind == "example-3.11") result = repro_br(cfg);
    else if (cfg.kind == "example-4.6") result = repro_refinement(cfg);
    else if (cfg.kind == "example-5.8") result = repro_perturbation(cfg);
    else result = repro_intersections(cfg);
    code = checks_exit(result);
    for (const auto& [k, v] : result.at("checks").items())
      if (!v.get<bool>()) err << "check failed: " << k << "\n";
    if (!cfg.golden.empty()) {
      std::ifstream in(cfg.golden);
      if (!in) invalid("cannot read golden '" + cfg.golden + "'");
      json golden = json::parse(in);
      auto diffs = json_io::golden_diff(golden, result, cfg.tolerance.value_or(1e-9));
      for (const auto& d : diffs) err << "golden mismatch at " << (d.empty() ? "/" : d) << "\n";
      if (!diffs.empty()) code = 2;
      else err << "golden match: " << cfg.golden << "\n";
    }
  }
  emit(cfg, result, out);
  return code;
}

void add_common(CLI::App* app, RunConfig& cfg) {
  app->add_option("--input", cfg.input, "input JSON");
  app->add_option("--output", cfg.output, "output JSON (default stdout)");
  app->add_option("--tolerance", cfg.tolerance, "verdict / comparison tolerance")->check(CLI::PositiveNumber);
  app->add_option("--window", cfg.window, "verification window")->check(CLI::Range(16L, 1L << 30));
  app->add_flag("--exact", cfg.exact, "exact arithmetic only");
  app->add_option("--N", cfg.n, "dilation factor");
  app->add_option("--count", cfg.count, "number of layers / prefixes")->check(CLI::PositiveNumber);
  app->add_option("--ratio", cfg.ratio, "ratio of a geometric family");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Generalized shift-invariant frames: construct, analyze, verify, repro", "gsi"};
  app.require_subcommand(1, 1);

  auto* construct = app.add_subcommand("construct", "build a system");
  construct->add_option("kind", cfg.kind)
      ->required()
      ->check(CLI::IsMember({"shannon", "br", "refine", "cubes", "small-bw-onb", "near-iso"}));
  add_common(construct, cfg);

  auto* analyze = app.add_subcommand("analyze", "analysis quantities of a system");
  analyze->add_option("kind", cfg.kind)
      ->required()
      ->check(CLI::IsMember({"calderon", "talpha", "bandwidth", "mean", "ucp", "lic"}));
  add_common(analyze, cfg);
  analyze->add_option("--family", cfg.family, "lattice family (geometric)");
  analyze->add_option("--first", cfg.first, "first covolume of a geometric family (default: ratio)");
  analyze->add_option("--alpha", cfg.alpha, "frequency, comma separated");
  analyze->add_option("--csv", cfg.csv, "CSV file for the Calderon curve");
  analyze->add_option("--samples", cfg.samples, "CSV samples on continuous domains")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "frame verdicts");
  verify->add_option("kind", cfg.kind)->required()->check(CLI::IsMember({"parseval", "dual", "audit", "independence"}));
  add_common(verify, cfg);
  verify->add_option("--ucp", cfg.ucp, "declared UCP status")
      ->check(CLI::IsMember({"automatic", "evidenced", "declared", "violated", "unknown"}));

  auto* repro = app.add_subcommand("repro", "reproduce a worked example");
  repro->add_option("kind", cfg.kind)
      ->required()
      ->check(CLI::IsMember({"example-3.11", "example-4.6", "example-5.8", "example-5.9"}));
  add_common(repro, cfg);
  repro->add_option("--golden", cfg.golden, "golden JSON to compare against");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }
  for (auto* sub : {construct, analyze, verify, repro})
    if (sub->parsed()) cfg.command = sub->get_name();

  try {
    return execute(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const GsiError& e) {
    std::string message = e.what();
    std::string name(error_name(e.code()));
    if (message.rfind(name + ": ", 0) == 0) message = message.substr(name.size() + 2);
    json j{{"error", name}, {"message", message}};
    err << name << ": " << message << "\n";
    try {
      emit(cfg, j, out);
    } catch (const GsiError&) {
      out << json_io::dump(j);
    }
    return 1;
  } catch (const json::exception& e) {
    json j{{"error", "InvalidInput"}, {"message", e.what()}};
    err << "InvalidInput: " << e.what() << "\n";
    emit(cfg, j, out);
    return 1;
  }
}

}  // namespace gsi::cli
