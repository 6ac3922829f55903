#include "gsi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gsi/error.hpp"

namespace gsi {

namespace {

GroupPoint zero_point(std::size_t n) { return GroupPoint(n, Rational(0)); }

bool is_zero(const GroupPoint& p) {
  return std::all_of(p.begin(), p.end(), [](const Rational& q) { return q == 0; });
}

Spectrum test_spectrum(const GsiSystem& system, const TestFunction& f) {
  validate_test_function(f, system.model);
  return spectrum(f.f, system.model);
}

void check_layer(const GsiSystem& system, std::size_t j) {
  if (j >= system.layers.size())
    throw GsiError(ErrorCode::InvalidInput, "layer " + std::to_string(j) + " does not exist");
}

// Bounding box [lo, hi] of a spectrum's support (non-periodic domains).
std::optional<std::pair<RatVector, RatVector>> support_bounds(const Spectrum& s) {
  BoxSet support = s.support();
  if (support.empty()) return std::nullopt;
  RatVector lo = lower_corner(support.boxes[0]), hi = upper_corner(support.boxes[0]);
  for (const auto& b : support.boxes)
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (b[k].lo < lo[k]) lo[k] = b[k].lo;
      if (b[k].hi > hi[k]) hi[k] = b[k].hi;
    }
  return std::make_pair(lo, hi);
}

// Points of `dual` that can make a(.) * b(. + alpha) nonzero.
std::vector<GroupPoint> overlap_candidates(const Lattice& dual, const Spectrum& a, const Spectrum& b) {
  if (dual.ambient.is_compact()) return lattice_points(dual);
  auto ba = support_bounds(a), bb = support_bounds(b);
  if (!ba || !bb) return {};
  RatVector lo(ba->first.size()), hi(ba->first.size());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    lo[k] = ba->first[k] - bb->second[k];
    hi[k] = ba->second[k] - bb->first[k];
  }
  return lattice_points_in_box(dual, lo, hi);
}

Scalar d_impl(const Spectrum& fh, const Spectrum& g, const Spectrum& h, const Rational& covol,
              const GroupPoint& alpha) {
  Spectrum fa = fh.shifted(alpha);
  Spectrum product = fh * g.conj();
  if (product.pieces().empty()) return Scalar();
  product = product * fa.conj();
  if (product.pieces().empty()) return Scalar();
  product = product * h.shifted(alpha);
  return Scalar(Rational(1) / covol) * product.integral();
}

Rational tail_factor(const GsiSystem& system) {
  const GeometricTail& t = *system.tail;
  return Rational(1) / (covolume(system.layers.back().lattice) * (t.ratio - 1));
}

}  // namespace

// ---------------------------------------------------------------- TrigPolynomial

Scalar TrigPolynomial::evaluate(const GroupPoint& x) const {
  Scalar s;
  for (const auto& [alpha, c] : terms) s += c.rotate(character_phase(model, x, alpha));
  return s;
}

Scalar TrigPolynomial::constant() const {
  auto it = terms.find(zero_point(model.dimension));
  return it == terms.end() ? Scalar() : it->second;
}

TrigPolynomial& TrigPolynomial::operator+=(const TrigPolynomial& other) {
  if (terms.empty() && model.dimension != other.model.dimension) model = other.model;
  for (const auto& [alpha, c] : other.terms) {
    auto [it, inserted] = terms.try_emplace(alpha, c);
    if (!inserted) it->second += c;
  }
  return *this;
}

void TrigPolynomial::prune() {
  std::erase_if(terms, [](const auto& kv) { return kv.second.is_exact_zero(); });
}

// ---------------------------------------------------------------- layers

SystemSpectra prepare(const GsiSystem& system) {
  SystemSpectra s;
  s.domain = SpectralDomain::dual_of(system.model);
  for (std::size_t j = 0; j < system.layers.size(); ++j) {
    s.g.push_back(spectrum(system.layers[j].g, system.model));
    s.h.push_back(system.layers[j].h ? spectrum(*system.layers[j].h, system.model) : s.g.back());
    s.covol.push_back(covolume(system.layers[j].lattice));
    s.duals.push_back(dual_lattice(system.layers[j].lattice));
  }
  return s;
}

Scalar d_coefficient(const GsiSystem& system, const TestFunction& f, std::size_t j, const GroupPoint& alpha) {
  check_layer(system, j);
  Lattice dual = dual_lattice(system.layers[j].lattice);
  if (alpha.size() != dual.dimension() || !dual.contains(alpha))
    throw GsiError(ErrorCode::FrequencyNotInDualLattice, "frequency is not in the dual of layer " + std::to_string(j));
  Spectrum fh = test_spectrum(system, f);
  return d_impl(fh, spectrum(system.layers[j].g, system.model), spectrum(system.synthesis(j), system.model),
                covolume(system.layers[j].lattice), canonical_point(dual.ambient, alpha));
}

std::vector<GroupPoint> alpha_candidates(const GsiSystem& system, const TestFunction& f, std::size_t j) {
  check_layer(system, j);
  Spectrum fh = test_spectrum(system, f);
  return overlap_candidates(dual_lattice(system.layers[j].lattice), fh, fh);
}

TrigPolynomial w_layer(const GsiSystem& system, const TestFunction& f, std::size_t j) {
  check_layer(system, j);
  Spectrum fh = test_spectrum(system, f);
  Spectrum g = spectrum(system.layers[j].g, system.model);
  Spectrum h = spectrum(system.synthesis(j), system.model);
  Rational covol = covolume(system.layers[j].lattice);
  TrigPolynomial p{system.model, {}};
  for (const auto& alpha : overlap_candidates(dual_lattice(system.layers[j].lattice), fh, fh)) {
    Scalar d = d_impl(fh, g, h, covol, alpha);
    if (!d.is_exact_zero()) p.terms.emplace(alpha, d);
  }
  return p;
}

TrigPolynomial w_total(const GsiSystem& system, const TestFunction& f,
                       const std::optional<std::vector<std::size_t>>& subset) {
  TrigPolynomial total{system.model, {}};
  if (subset) {
    for (std::size_t j : *subset) total += w_layer(system, f, j);
  } else {
    for (std::size_t j = 0; j < system.layers.size(); ++j) total += w_layer(system, f, j);
  }
  total.prune();
  return total;
}

// ---------------------------------------------------------------- Calderon / t_alpha

Spectrum calderon_spectrum(const GsiSystem& system) {
  SpectralDomain domain = SpectralDomain::dual_of(system.model);
  std::vector<Spectrum> parts;
  for (const auto& layer : system.layers) {
    Spectrum g = spectrum(layer.g, system.model);
    parts.push_back((g.conj() * g).scaled(Scalar(Rational(1) / covolume(layer.lattice))));
  }
  return Spectrum::sum(parts, domain);
}

std::optional<TailValue> calderon_tail(const GsiSystem& system) {
  if (!system.tail) return std::nullopt;
  Scalar v(system.tail->generator_sq * tail_factor(system));
  return TailValue{v, system.tail->constant_modulus};
}

Scalar calderon_sum(const GsiSystem& system, const GroupPoint& omega) {
  Scalar s = calderon_spectrum(system).at(omega);
  if (auto t = calderon_tail(system)) {
    if (!t->exact) throw GsiError(ErrorCode::NonEvaluable, "tail modulus is only bounded");
    s += t->value;
  }
  return s;
}

TAlpha t_alpha(const GsiSystem& system, const GroupPoint& alpha) { return t_alpha(system, prepare(system), alpha); }

TAlpha t_alpha(const GsiSystem& system, const SystemSpectra& spectra, const GroupPoint& alpha) {
  TAlpha out;
  GroupModel dual_model = dual_group(system.model);
  out.alpha = canonical_point(dual_model, alpha);
  std::vector<Spectrum> parts;
  for (std::size_t j = 0; j < system.layers.size(); ++j) {
    if (!spectra.duals[j].contains(out.alpha)) continue;
    out.layers.push_back(j);
    parts.push_back((spectra.g[j].conj() * spectra.h[j].shifted(out.alpha)).scaled(Scalar(Rational(1) / spectra.covol[j])));
  }
  if (out.layers.empty() && !system.tail)
    throw GsiError(ErrorCode::FrequencyNotInAnyDualLattice, "no layer has this frequency in its dual lattice");
  out.values = Spectrum::sum(parts, spectra.domain);
  if (system.tail) {
    Scalar bound(system.tail->generator_sq * tail_factor(system));
    out.tail = TailValue{bound, is_zero(out.alpha) && system.tail->constant_modulus};
  }
  return out;
}

std::vector<GroupPoint> relevant_alphas(const GsiSystem& system, const SystemSpectra& spectra) {
  std::set<GroupPoint> found{zero_point(system.model.dimension)};
  for (std::size_t j = 0; j < system.layers.size(); ++j) {
    if (spectra.g[j].support().empty() || spectra.h[j].support().empty()) continue;
    Spectrum gc = spectra.g[j].conj();
    for (const auto& alpha : overlap_candidates(spectra.duals[j], spectra.g[j], spectra.h[j])) {
      if (found.count(alpha)) continue;
      if (!(gc * spectra.h[j].shifted(alpha)).simplified().pieces().empty()) found.insert(alpha);
    }
  }
  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------- bandwidth

Bandwidth bandwidth(const std::vector<Lattice>& lattices) {
  Bandwidth b;
  for (const auto& l : lattices) b.prefix += Rational(1) / covolume(l);
  b.total = b.prefix;
  return b;
}

Bandwidth bandwidth(const GsiSystem& system) {
  std::vector<Lattice> lattices;
  for (const auto& layer : system.layers) lattices.push_back(layer.lattice);
  Bandwidth b = bandwidth(lattices);
  if (system.tail) b.total = b.prefix + tail_factor(system);
  return b;
}

Bandwidth geometric_bandwidth(const Rational& first_covolume, const Rational& ratio) {
  if (first_covolume <= 0 || ratio <= 0) throw GsiError(ErrorCode::InvalidInput, "covolumes must be positive");
  Bandwidth b;
  b.prefix = Rational(1) / first_covolume;
  if (ratio <= 1) {
    b.infinite = true;
    return b;
  }
  b.total = ratio / (first_covolume * (ratio - 1));
  return b;
}

// ---------------------------------------------------------------- means

std::complex<double> MeanEstimate::value() const {
  if (exact) return exact->value();
  return windowed.empty() ? std::complex<double>{} : windowed.back().second;
}

std::vector<long> default_window_schedule() {
  std::vector<long> s;
  for (long n = 16; n <= 4096; n *= 2) s.push_back(n);
  return s;
}

MeanEstimate mean_exact(const TrigPolynomial& p) {
  MeanEstimate m;
  m.exact = p.constant();
  m.converged = true;
  return m;
}

MeanEstimate mean_windowed(const SampledFunction& p, const GroupModel& model, const std::vector<long>& schedule) {
  MeanEstimate m;
  if (!p) throw GsiError(ErrorCode::NonEvaluable, "nothing to evaluate");
  if (model.kind == GroupKind::Finite) {
    if (model.moduli.size() != 1 || model.order() > Integer(1L << 24))
      throw GsiError(ErrorCode::NonEvaluable, "finite window too large");
    long order = model.order().get_si();
    std::complex<double> s = 0;
    for (long x = 0; x < order; ++x) s += p({Rational(x)});
    m.windowed.emplace_back(order, s / static_cast<double>(order));
    m.converged = true;
    return m;
  }
  if (model.dimension != 1 || model.kind == GroupKind::Torus)
    throw GsiError(ErrorCode::NonEvaluable, "windowed means are implemented on Z_M, Z and R");
  if (schedule.empty() || !std::is_sorted(schedule.begin(), schedule.end()) || schedule.front() < 1)
    throw GsiError(ErrorCode::InvalidInput, "window schedule must be increasing and positive");
  // Running sums over growing symmetric windows.
  const long steps_per_unit = model.kind == GroupKind::Real ? 16 : 1;
  std::complex<double> sum = 0;
  long reached = 0;
  auto sample = [&](long k) {
    // Integer point k, or the midpoint of the k-th subinterval on R.
    if (model.kind == GroupKind::Integer) return p({Rational(k)});
    Rational x = Rational(2 * k + (k >= 0 ? 1 : -1), 2 * steps_per_unit);
    x.canonicalize();
    return p({x});
  };
  if (model.kind == GroupKind::Integer) sum = sample(0);
  for (long n : schedule) {
    long target = n * steps_per_unit;
    for (long k = reached + 1; k <= target; ++k) {
      if (model.kind == GroupKind::Integer) {
        sum += sample(k) + sample(-k);
      } else {
        sum += sample(k - 1) + sample(-k);
      }
    }
    reached = target;
    double count = model.kind == GroupKind::Integer ? 2.0 * n + 1 : 2.0 * static_cast<double>(target);
    m.windowed.emplace_back(n, sum / count);
  }
  if (m.windowed.size() >= 2)
    m.converged = std::abs(m.windowed.back().second - m.windowed[m.windowed.size() - 2].second) < 1e-4;
  return m;
}

// ---------------------------------------------------------------- UCP

UcpReport ucp_residual(const GsiSystem& system, const TestFunction& f, const std::vector<std::size_t>& prefixes,
                       const std::optional<Scalar>& target) {
  UcpReport r;
  const std::size_t L = system.layers.size();
  for (std::size_t m : prefixes)
    if (m > L) throw GsiError(ErrorCode::InvalidInput, "prefix longer than the stored family");

  Spectrum fh = test_spectrum(system, f);
  Scalar norm = (fh.conj() * fh).integral();
  std::optional<Scalar> full = target;
  if (!full && (system.claims.onb || system.claims.parseval)) full = norm;
  if (!full && system.tail)
    throw GsiError(ErrorCode::TargetUnknown, "the full w-function of an infinite family is neither known nor supplied");

  if (!system.is_dual()) {
    // Nonnegative residual: the mean is the constant term.
    r.method = "exact-constant-term";
    std::vector<Scalar> d0(L);
    Scalar all;
    for (std::size_t j = 0; j < L; ++j) {
      d0[j] = d_coefficient(system, f, j, zero_point(system.model.dimension));
      all += d0[j];
    }
    if (!full) full = all;
    r.target = *full;
    for (std::size_t m : prefixes) {
      Scalar partial;
      for (std::size_t j = 0; j < m; ++j) partial += d0[j];
      r.entries.push_back({m, *full - partial});
    }
    if (system.tail) {
      auto t = calderon_tail(system);
      if (t->exact) {
        // Tail layers have |g^|^2 constant, so sum_j d_{j,0} over the tail is that constant times ||f||^2.
        r.limit = *full - all - t->value * norm;
      }
    } else {
      r.limit = *full - all;
    }
  } else {
    if (system.tail) throw GsiError(ErrorCode::TargetUnknown, "dual systems with tails are not supported");
    r.method = "windowed";
    r.target = full ? *full : Scalar();
    std::vector<TrigPolynomial> layers;
    TrigPolynomial all{system.model, {}};
    for (std::size_t j = 0; j < L; ++j) {
      layers.push_back(w_layer(system, f, j));
      all += layers.back();
    }
    auto residual = [&](std::size_t m) {
      TrigPolynomial rest{system.model, {}};
      for (std::size_t j = m; j < L; ++j) rest += layers[j];
      // A supplied target replaces the constant term of the full sum.
      if (full) rest.terms[zero_point(system.model.dimension)] += *full - all.constant();
      auto estimate = mean_windowed(
          [&](const GroupPoint& x) { return std::complex<double>(rest.evaluate(x).abs(), 0); }, system.model);
      return Scalar(estimate.value());
    };
    for (std::size_t m : prefixes) r.entries.push_back({m, residual(m)});
    r.limit = residual(L);
  }

  if (!r.limit) {
    r.status = UcpStatus::Unknown;
  } else if (!system.tail) {
    r.status = UcpStatus::Automatic;
  } else if (auto q = r.limit->exact_real(); q && *q == 0) {
    r.status = UcpStatus::Evidenced;
  } else if (r.limit->abs() > 1e-9) {
    r.status = UcpStatus::Violated;
  } else {
    r.status = UcpStatus::Evidenced;
  }
  return r;
}

// ---------------------------------------------------------------- LIC

LicCoefficients lic_coefficients(const GsiSystem& system, const TestFunction& f, std::size_t j,
                                 const GroupPoint& alpha) {
  check_layer(system, j);
  Lattice dual = dual_lattice(system.layers[j].lattice);
  if (alpha.size() != dual.dimension() || !dual.contains(alpha))
    throw GsiError(ErrorCode::FrequencyNotInDualLattice, "frequency is not in the dual of layer " + std::to_string(j));
  GroupPoint a = canonical_point(dual.ambient, alpha);
  Spectrum fh = test_spectrum(system, f);
  Spectrum g = spectrum(system.layers[j].g, system.model);
  Spectrum h = spectrum(system.synthesis(j), system.model);
  Rational covol = covolume(system.layers[j].lattice);
  Scalar inv(Rational(1) / covol);
  Spectrum fa = fh.shifted(a);
  LicCoefficients out;
  out.c = inv * (fh * g * fa * h.shifted(a)).integral_abs();
  out.c_tilde = inv * (fh * fa * g * g.conj()).integral_abs();
  out.d_abs = d_impl(fh, g, h, covol, a).abs();
  return out;
}

Scalar lic_layer_sum(const GsiSystem& system, const TestFunction& f, std::size_t j) {
  check_layer(system, j);
  Spectrum fh = test_spectrum(system, f).simplified();
  Lattice dual = dual_lattice(system.layers[j].lattice);
  // |f^| constant on the whole dual group: every alpha contributes the same.
  const auto& d = fh.domain();
  if (dual.ambient.is_compact() && fh.pieces().size() == 1 && fh.pieces()[0].terms.size() == 1 &&
      d.fundamental_box() && fh.pieces()[0].box == *d.fundamental_box()) {
    // A finite subgroup of a dual group of total mass 1 has 1/covol points.
    Rational count = Rational(1) / covolume(dual);
    return Scalar(count) * lic_coefficients(system, f, j, zero_point(dual.dimension())).c_tilde;
  }
  Scalar total;
  for (const auto& alpha : overlap_candidates(dual, fh, fh)) total += lic_coefficients(system, f, j, alpha).c_tilde;
  return total;
}

}  // namespace gsi
