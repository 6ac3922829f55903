#include "gsi/generator.hpp"

#include <cmath>
#include <numbers>

#include "gsi/error.hpp"

namespace gsi {

namespace {

long modulus_of(const GroupModel& model) {
  if (model.kind != GroupKind::Finite || model.moduli.size() != 1)
    throw GsiError(ErrorCode::VariantMismatch, "dense vectors live on Z_M");
  if (!model.moduli[0].fits_slong_p() || model.moduli[0] > 1L << 20)
    throw GsiError(ErrorCode::ModelTooLarge, "modulus too large for dense vectors");
  return model.moduli[0].get_si();
}

// sum_x v[x] exp(sign 2 pi i x w / M), exact whenever every contributing
// term has an exact value and a quarter-turn phase.
std::vector<Scalar> dft(const std::vector<Scalar>& v, int sign) {
  const long m = static_cast<long>(v.size());
  std::vector<std::complex<double>> twiddle(m);
  for (long k = 0; k < m; ++k) {
    double a = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    twiddle[k] = {std::cos(a), std::sin(a)};
  }
  std::vector<Scalar> out(m);
  for (long w = 0; w < m; ++w) {
    ComplexRational exact{0, 0};
    std::complex<double> approx = 0;
    bool is_exact = true;
    for (long x = 0; x < m; ++x) {
      const Scalar& c = v[x];
      if (c.is_exact_zero()) continue;
      long r = (x * w) % m;
      approx += c.value() * twiddle[r];
      if (is_exact && c.is_exact() && (4 * r) % m == 0) {
        static const ComplexRational units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        long quarter = (4 * r / m) % 4;
        if (sign < 0) quarter = (4 - quarter) % 4;
        exact = exact + *c.exact() * units[quarter];
      } else {
        is_exact = false;
      }
    }
    out[w] = is_exact ? Scalar(exact) : Scalar(approx);
  }
  return out;
}

}  // namespace

const char* variant_name(const Generator& g) {
  switch (g.index()) {
    case 0: return "dense";
    case 1: return "sequence";
    default: return "boxes";
  }
}

Spectrum spectrum(const Generator& g, const GroupModel& model) {
  SpectralDomain domain = SpectralDomain::dual_of(model);
  if (auto d = std::get_if<DenseVector>(&g)) {
    long m = modulus_of(model);
    if (static_cast<long>(d->values.size()) != m)
      throw GsiError(ErrorCode::InvalidInput, "dense vector length differs from the modulus");
    return Spectrum::from_values(domain, d->domain == Domain::Time ? dft(d->values, -1) : d->values);
  }
  if (auto s = std::get_if<FiniteSequence>(&g)) {
    if (model.kind != GroupKind::Integer) throw GsiError(ErrorCode::VariantMismatch, "sequences live on Z");
    TermMap terms;
    for (std::size_t k = 0; k < s->values.size(); ++k)
      if (!s->values[k].is_exact_zero())
        terms.emplace(RatVector{Rational(s->start + static_cast<long>(k))}, s->values[k]);
    return Spectrum::trigonometric(domain, terms);
  }
  const auto& b = std::get<BoxSpectrum>(g);
  if (model.kind != GroupKind::Integer && model.kind != GroupKind::Real)
    throw GsiError(ErrorCode::VariantMismatch, "box spectra live on the duals of Z and R^n");
  RatVector shift = b.shift.empty() ? RatVector(model.dimension, Rational(0)) : b.shift;
  if (shift.size() != model.dimension) throw GsiError(ErrorCode::InvalidInput, "shift dimension mismatch");
  if (model.kind == GroupKind::Integer) {
    if (!is_integer(shift[0])) throw GsiError(ErrorCode::InvalidInput, "shifts on Z are integers");
    for (const auto& [box, c] : b.boxes)
      if (box[0].lo < 0 || box[0].hi > 1) throw GsiError(ErrorCode::InvalidInput, "torus boxes lie in [0, 1)");
  }
  Spectrum s(domain);
  for (const auto& [box, c] : b.boxes) {
    if (box.size() != model.dimension) throw GsiError(ErrorCode::InvalidInput, "box dimension mismatch");
    if (!c.is_exact_zero()) s.add_piece(box, TermMap{{shift, c}});
  }
  return s.simplified();
}

DenseVector fourier(const DenseVector& v, Direction direction, const GroupModel& model) {
  long m = modulus_of(model);
  if (static_cast<long>(v.values.size()) != m)
    throw GsiError(ErrorCode::InvalidInput, "dense vector length differs from the modulus");
  DenseVector out;
  if (direction == Direction::Forward) {
    if (v.domain != Domain::Time) throw GsiError(ErrorCode::VariantMismatch, "forward transform needs time values");
    out.domain = Domain::Frequency;
    out.values = dft(v.values, -1);
  } else {
    if (v.domain != Domain::Frequency)
      throw GsiError(ErrorCode::VariantMismatch, "inverse transform needs frequency values");
    out.domain = Domain::Time;
    out.values = dft(v.values, +1);
    Scalar scale(Rational(1, m));
    for (auto& x : out.values) x = scale * x;
  }
  return out;
}

Generator fourier(const Generator& g, Direction direction, const GroupModel& model) {
  if (auto d = std::get_if<DenseVector>(&g)) return fourier(*d, direction, model);
  throw GsiError(ErrorCode::VariantMismatch,
                 std::string(variant_name(g)) + " has no finite representation on the other side");
}

FiniteSequence inverse_fourier_sequence(const Spectrum& s) {
  const auto& d = s.domain();
  if (!d.period || d.discrete || *d.period != 1)
    throw GsiError(ErrorCode::VariantMismatch, "not a spectrum on T");
  Spectrum t = s.simplified();
  if (t.pieces().size() != 1 || t.pieces()[0].box[0].lo != 0 || t.pieces()[0].box[0].hi != 1)
    throw GsiError(ErrorCode::VariantMismatch, "spectrum is not a trigonometric polynomial");
  const TermMap& terms = t.pieces()[0].terms;
  for (const auto& [kappa, c] : terms)
    if (!is_integer(kappa[0])) throw GsiError(ErrorCode::VariantMismatch, "non-integer frequency");
  FiniteSequence out;
  if (terms.empty()) return out;
  out.start = terms.begin()->first[0].get_num();
  Integer last = terms.rbegin()->first[0].get_num();
  out.values.assign(Integer(last - out.start + 1).get_ui(), Scalar());
  for (const auto& [kappa, c] : terms) out.values[Integer(kappa[0].get_num() - out.start).get_ui()] = c;
  return out;
}

std::complex<double> inverse_fourier_at(const BoxSpectrum& b, const RatVector& x) {
  std::complex<double> total = 0;
  for (const auto& [box, c] : b.boxes) {
    RatVector kappa(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) kappa[i] = (b.shift.empty() ? Rational(0) : b.shift[i]) - x[i];
    total += c.value() * exponential_integral(box, kappa).value();
  }
  return total;
}

std::vector<std::complex<double>> time_values(const Generator& g, const GroupModel& model) {
  long m = modulus_of(model);
  const auto* d = std::get_if<DenseVector>(&g);
  if (!d) throw GsiError(ErrorCode::VariantMismatch, "time values exist for dense vectors only");
  std::vector<std::complex<double>> out(m);
  if (d->domain == Domain::Time) {
    for (long x = 0; x < m; ++x) out[x] = d->values[x].value();
    return out;
  }
  for (long x = 0; x < m; ++x) {
    std::complex<double> s = 0;
    for (long w = 0; w < m; ++w) {
      double a = 2.0 * std::numbers::pi * static_cast<double>((x * w) % m) / static_cast<double>(m);
      s += d->values[w].value() * std::complex<double>(std::cos(a), std::sin(a));
    }
    out[x] = s / static_cast<double>(m);
  }
  return out;
}

Generator translate(const Generator& g, const GroupPoint& gamma, const GroupModel& model) {
  if (auto d = std::get_if<DenseVector>(&g)) {
    long m = modulus_of(model);
    long shift = mod(gamma.at(0).get_num(), Integer(m)).get_si();
    DenseVector out{d->domain, std::vector<Scalar>(m)};
    if (d->domain == Domain::Time) {
      for (long x = 0; x < m; ++x) out.values[(x + shift) % m] = d->values[x];
    } else {
      for (long w = 0; w < m; ++w) out.values[w] = d->values[w].rotate(ratio(-(shift * w % m), m));
    }
    return out;
  }
  if (auto s = std::get_if<FiniteSequence>(&g)) {
    FiniteSequence out = *s;
    out.start += gamma.at(0).get_num();
    return out;
  }
  BoxSpectrum out = std::get<BoxSpectrum>(g);
  if (out.shift.empty()) out.shift.assign(model.dimension, Rational(0));
  for (std::size_t i = 0; i < out.shift.size(); ++i) out.shift[i] += gamma.at(i);
  return out;
}

Scalar norm_squared(const Generator& g, const GroupModel& model) {
  if (auto d = std::get_if<DenseVector>(&g); d && d->domain == Domain::Time) {
    Scalar s;
    for (const auto& v : d->values) s += v.norm_sq();
    return s;
  }
  if (auto q = std::get_if<FiniteSequence>(&g)) {
    Scalar s;
    for (const auto& v : q->values) s += v.norm_sq();
    return s;
  }
  Spectrum s = spectrum(g, model);
  return (s.conj() * s).integral();
}

void validate_test_function(const TestFunction& f, const GroupModel& model) {
  if (f.blind_spot.empty()) return;
  SpectralDomain domain = SpectralDomain::dual_of(model);
  if (domain.discrete) throw GsiError(ErrorCode::InvalidInput, "points of a finite dual group are not null sets");
  Spectrum s = spectrum(f.f, model);
  for (const auto& p : f.blind_spot)
    for (const auto& box : s.support().boxes) {
      bool near = true;
      for (std::size_t k = 0; k < box.size(); ++k) {
        Rational x = p.at(k);
        if (domain.period) x = frac(x);
        if (x < box[k].lo || x > box[k].hi) near = false;
      }
      // On T the point 0 also touches boxes ending at 1.
      if (!near && domain.period && frac(p.at(0)) == 0 && box[0].hi == 1) near = true;
      if (near) throw GsiError(ErrorCode::InvalidInput, "spectrum support meets the blind spot");
    }
}

Generator unit_impulse(const GroupModel& model) {
  if (model.kind == GroupKind::Finite) {
    long m = modulus_of(model);
    DenseVector d{Domain::Time, std::vector<Scalar>(m)};
    d.values[0] = Scalar(Rational(1));
    return d;
  }
  if (model.kind == GroupKind::Integer) return FiniteSequence{Integer(0), {Scalar(Rational(1))}};
  throw GsiError(ErrorCode::UnsupportedModel, "no unit impulse on " + model.name());
}

}  // namespace gsi
