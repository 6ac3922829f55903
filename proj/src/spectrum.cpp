#include "gsi/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "gsi/error.hpp"

namespace gsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Rational dot(const RatVector& a, const RatVector& b) {
  Rational s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_zero_vector(const RatVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

void accumulate(TermMap& into, const RatVector& kappa, const Scalar& c) {
  auto [it, inserted] = into.try_emplace(kappa, c);
  if (!inserted) it->second += c;
}

void sort_pieces(std::vector<Piece>& pieces) {
  std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.box < b.box; });
}

// exp(-2 pi i kappa t) evaluated numerically.
std::complex<double> phase(double kappa_dot_t) {
  return {std::cos(kTwoPi * kappa_dot_t), -std::sin(kTwoPi * kappa_dot_t)};
}

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                       -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                       0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

double integrate_abs_numeric(const Box& box, const TermMap& terms) {
  std::size_t n = box.size();
  std::vector<std::vector<double>> nodes(n), weights(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = to_double(box[k].lo), hi = to_double(box[k].hi);
    double kmax = 0;
    for (const auto& [kappa, c] : terms) kmax = std::max(kmax, std::abs(to_double(kappa[k])));
    int panels = std::clamp(static_cast<int>(std::ceil(2.0 * kmax * (hi - lo))) + 1, 1, 400);
    double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      double mid = lo + (p + 0.5) * h;
      for (std::size_t q = 0; q < kNodes.size(); ++q) {
        nodes[k].push_back(mid + 0.5 * h * kNodes[q]);
        weights[k].push_back(0.5 * h * kWeights[q]);
      }
    }
  }
  std::vector<std::pair<std::vector<double>, std::complex<double>>> numeric;
  for (const auto& [kappa, c] : terms) {
    std::vector<double> kd;
    for (const auto& q : kappa) kd.push_back(to_double(q));
    numeric.emplace_back(std::move(kd), c.value());
  }
  std::vector<std::size_t> idx(n, 0);
  double total = 0;
  while (true) {
    double w = 1;
    for (std::size_t k = 0; k < n; ++k) w *= weights[k][idx[k]];
    std::complex<double> v = 0;
    for (const auto& [kd, c] : numeric) {
      double t = 0;
      for (std::size_t k = 0; k < n; ++k) t += kd[k] * nodes[k][idx[k]];
      v += c * phase(t);
    }
    total += w * std::abs(v);
    std::size_t k = 0;
    while (k < n) {
      if (++idx[k] < nodes[k].size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == n) break;
  }
  return total;
}

}  // namespace

SpectralDomain SpectralDomain::dual_of(const GroupModel& model) {
  SpectralDomain d;
  d.dimension = model.dimension;
  switch (model.kind) {
    case GroupKind::Finite:
      if (model.moduli.size() != 1)
        throw GsiError(ErrorCode::UnsupportedModel, "spectra are supported on duals of cyclic groups");
      d.period = Rational(model.moduli[0]);
      d.density = Rational(1) / Rational(model.moduli[0]);
      d.discrete = true;
      break;
    case GroupKind::Integer:
      if (model.dimension != 1) throw GsiError(ErrorCode::UnsupportedModel, "only Z is supported");
      d.period = Rational(1);
      break;
    case GroupKind::Real: break;
    case GroupKind::Torus: throw GsiError(ErrorCode::UnsupportedModel, "time side must be Z, Z_M or R^n");
  }
  return d;
}

std::optional<Box> SpectralDomain::fundamental_box() const {
  if (!period) return std::nullopt;
  return Box{Interval{Rational(0), *period}};
}

Spectrum Spectrum::piecewise_constant(SpectralDomain domain, const std::vector<std::pair<Box, Scalar>>& values) {
  Spectrum s(std::move(domain));
  for (const auto& [box, c] : values) s.add_piece(box, TermMap{{RatVector(s.domain_.dimension, Rational(0)), c}});
  sort_pieces(s.pieces_);
  return s;
}

Spectrum Spectrum::from_values(SpectralDomain domain, const std::vector<Scalar>& values) {
  if (!domain.discrete) throw GsiError(ErrorCode::VariantMismatch, "point values need a discrete dual");
  if (Rational(static_cast<long>(values.size())) != *domain.period)
    throw GsiError(ErrorCode::InvalidInput, "value count does not match the modulus");
  Spectrum s(std::move(domain));
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].is_exact_zero()) continue;
    Rational lo(static_cast<long>(k));
    s.pieces_.push_back(Piece{Box{Interval{lo, lo + 1}}, TermMap{{RatVector{Rational(0)}, values[k]}}});
  }
  return s;
}

Spectrum Spectrum::trigonometric(SpectralDomain domain, const TermMap& terms) {
  auto box = domain.fundamental_box();
  if (!box) throw GsiError(ErrorCode::VariantMismatch, "trigonometric spectra need a periodic dual");
  Spectrum s(std::move(domain));
  s.pieces_.push_back(Piece{*box, terms});
  return s;
}

void Spectrum::add_piece(Box box, TermMap terms) {
  if (box.size() != domain_.dimension) throw GsiError(ErrorCode::InvalidInput, "piece dimension mismatch");
  if (is_empty(box)) return;
  if (domain_.period) {
    for (auto& b : wrap_periodic(box, *domain_.period)) pieces_.push_back(Piece{b, terms});
  } else {
    pieces_.push_back(Piece{std::move(box), std::move(terms)});
  }
}

Scalar Spectrum::at(const RatVector& omega) const {
  RatVector w = omega;
  if (domain_.period) w[0] = w[0] - Rational(floor(w[0] / *domain_.period)) * *domain_.period;
  for (const auto& p : pieces_) {
    if (!contains(p.box, w)) continue;
    Scalar v;
    for (const auto& [kappa, c] : p.terms) v += c.rotate(-dot(kappa, w));
    return v;
  }
  return Scalar();
}

Spectrum Spectrum::conj() const {
  Spectrum s(domain_);
  for (const auto& p : pieces_) {
    TermMap t;
    for (const auto& [kappa, c] : p.terms) {
      RatVector neg(kappa.size());
      for (std::size_t i = 0; i < kappa.size(); ++i) neg[i] = -kappa[i];
      t.emplace(std::move(neg), c.conj());
    }
    s.pieces_.push_back(Piece{p.box, std::move(t)});
  }
  return s;
}

Spectrum Spectrum::scaled(const Scalar& c) const {
  Spectrum s(domain_);
  if (c.is_exact_zero()) return s;
  for (const auto& p : pieces_) {
    TermMap t;
    for (const auto& [kappa, v] : p.terms) t.emplace(kappa, c * v);
    s.pieces_.push_back(Piece{p.box, std::move(t)});
  }
  return s;
}

Spectrum Spectrum::shifted(const RatVector& alpha) const {
  Spectrum s(domain_);
  RatVector back(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) back[i] = -alpha[i];
  for (const auto& p : pieces_) {
    TermMap t;
    for (const auto& [kappa, c] : p.terms) t.emplace(kappa, c.rotate(-dot(kappa, alpha)));
    s.add_piece(translate(p.box, back), std::move(t));
  }
  sort_pieces(s.pieces_);
  return s;
}

Spectrum Spectrum::modulated(const RatVector& x) const {
  Spectrum s(domain_);
  if (domain_.discrete) {
    // Constant on unit cells: rotate each cell value by -x k / M.
    const Rational& m = *domain_.period;
    for (const auto& p : pieces_) {
      for (Rational k = p.box[0].lo; k < p.box[0].hi; k += 1) {
        TermMap t;
        for (const auto& [kappa, c] : p.terms) t.emplace(kappa, c.rotate(-x[0] * k / m));
        s.pieces_.push_back(Piece{Box{Interval{k, k + 1}}, std::move(t)});
      }
    }
    return s;
  }
  for (const auto& p : pieces_) {
    TermMap t;
    for (const auto& [kappa, c] : p.terms) {
      RatVector k2 = kappa;
      for (std::size_t i = 0; i < k2.size(); ++i) k2[i] += x[i];
      t.emplace(std::move(k2), c);
    }
    s.pieces_.push_back(Piece{p.box, std::move(t)});
  }
  return s;
}

Spectrum operator*(const Spectrum& a, const Spectrum& b) {
  if (!(a.domain_ == b.domain_)) throw GsiError(ErrorCode::IncompatibleAmbient, "spectra on different domains");
  Spectrum s(a.domain_);
  auto multiply_terms = [](const TermMap& x, const TermMap& y) {
    TermMap t;
    for (const auto& [k1, c1] : x)
      for (const auto& [k2, c2] : y) {
        Scalar c = c1 * c2;
        if (c.is_exact_zero()) continue;
        RatVector k = k1;
        for (std::size_t i = 0; i < k.size(); ++i) k[i] += k2[i];
        accumulate(t, k, c);
      }
    return t;
  };
  if (a.domain_.dimension == 1) {
    // Sweep over two sorted interval lists.
    std::vector<const Piece*> pa, pb;
    for (const auto& p : a.pieces_) pa.push_back(&p);
    for (const auto& p : b.pieces_) pb.push_back(&p);
    auto by_lo = [](const Piece* x, const Piece* y) { return x->box[0].lo < y->box[0].lo; };
    std::sort(pa.begin(), pa.end(), by_lo);
    std::sort(pb.begin(), pb.end(), by_lo);
    std::size_t i = 0, j = 0;
    while (i < pa.size() && j < pb.size()) {
      const Interval& x = pa[i]->box[0];
      const Interval& y = pb[j]->box[0];
      Interval c{x.lo < y.lo ? y.lo : x.lo, x.hi < y.hi ? x.hi : y.hi};
      if (!c.empty()) {
        TermMap t = multiply_terms(pa[i]->terms, pb[j]->terms);
        if (!t.empty()) s.pieces_.push_back(Piece{Box{c}, std::move(t)});
      }
      if (x.hi < y.hi)
        ++i;
      else
        ++j;
    }
    return s;
  }
  for (const auto& p : a.pieces_)
    for (const auto& q : b.pieces_)
      if (auto c = intersection(p.box, q.box)) {
        TermMap t = multiply_terms(p.terms, q.terms);
        if (!t.empty()) s.pieces_.push_back(Piece{*c, std::move(t)});
      }
  sort_pieces(s.pieces_);
  return s;
}

Spectrum Spectrum::sum(const std::vector<Spectrum>& parts, SpectralDomain domain) {
  for (const auto& p : parts)
    if (!(p.domain_ == domain)) throw GsiError(ErrorCode::IncompatibleAmbient, "spectra on different domains");
  std::size_t n = domain.dimension;
  std::vector<std::vector<Rational>> breaks(n);
  for (const auto& f : parts)
    for (const auto& p : f.pieces_)
      for (std::size_t k = 0; k < n; ++k) {
        breaks[k].push_back(p.box[k].lo);
        breaks[k].push_back(p.box[k].hi);
      }
  for (auto& b : breaks) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  std::map<std::vector<std::size_t>, TermMap> cells;
  for (const auto& f : parts)
    for (const auto& p : f.pieces_) {
      std::vector<std::size_t> lo(n), hi(n);
      for (std::size_t k = 0; k < n; ++k) {
        lo[k] = std::lower_bound(breaks[k].begin(), breaks[k].end(), p.box[k].lo) - breaks[k].begin();
        hi[k] = std::lower_bound(breaks[k].begin(), breaks[k].end(), p.box[k].hi) - breaks[k].begin();
      }
      std::vector<std::size_t> idx = lo;
      while (true) {
        TermMap& t = cells[idx];
        for (const auto& [kappa, c] : p.terms) accumulate(t, kappa, c);
        std::size_t k = 0;
        while (k < n) {
          if (++idx[k] < hi[k]) break;
          idx[k] = lo[k];
          ++k;
        }
        if (k == n) break;
      }
    }
  Spectrum s(std::move(domain));
  for (auto& [idx, terms] : cells) {
    Box box(n);
    for (std::size_t k = 0; k < n; ++k) box[k] = Interval{breaks[k][idx[k]], breaks[k][idx[k] + 1]};
    s.pieces_.push_back(Piece{std::move(box), std::move(terms)});
  }
  sort_pieces(s.pieces_);
  return s;
}

Scalar exponential_integral(const Box& box, const RatVector& kappa) {
  Scalar total(Rational(1));
  for (std::size_t k = 0; k < box.size(); ++k) {
    const Rational& a = box[k].lo;
    const Rational& b = box[k].hi;
    if (kappa[k] == 0) {
      total = total * Scalar(Rational(b - a));
      continue;
    }
    Rational turns = kappa[k] * (b - a);
    if (is_integer(turns)) return Scalar(Rational(0));
    double kd = to_double(kappa[k]);
    std::complex<double> num = phase(to_double(kappa[k] * b)) - phase(to_double(kappa[k] * a));
    std::complex<double> den(0.0, -kTwoPi * kd);
    total = total * Scalar(num / den);
  }
  return total;
}

Scalar Spectrum::integral() const {
  Scalar total;
  for (const auto& p : pieces_)
    for (const auto& [kappa, c] : p.terms) total += c * exponential_integral(p.box, kappa);
  return Scalar(domain_.density) * total;
}

Scalar Spectrum::integral_abs() const {
  Scalar total;
  for (const auto& p : pieces_) {
    std::size_t nonzero = 0;
    const Scalar* only = nullptr;
    for (const auto& [kappa, c] : p.terms)
      if (!c.is_exact_zero()) {
        ++nonzero;
        only = &c;
      }
    if (nonzero == 0) continue;
    if (nonzero == 1 || domain_.discrete) {
      Scalar cell_value = only->modulus();
      if (nonzero > 1) {
        // Discrete cells carry constants only; sum the constant terms.
        Scalar v;
        for (const auto& [kappa, c] : p.terms) v += c;
        cell_value = v.modulus();
      }
      total += Scalar(volume(p.box)) * cell_value;
    } else {
      total += Scalar(std::complex<double>(integrate_abs_numeric(p.box, p.terms), 0.0));
    }
  }
  return Scalar(domain_.density) * total;
}

double Spectrum::sup_bound() const {
  double best = 0;
  for (const auto& p : pieces_) {
    double s = 0;
    for (const auto& [kappa, c] : p.terms) s += c.abs();
    best = std::max(best, s);
  }
  return best;
}

BoxSet Spectrum::support() const {
  BoxSet out;
  for (const auto& p : pieces_)
    for (const auto& [kappa, c] : p.terms)
      if (!c.is_exact_zero()) {
        out.boxes.push_back(p.box);
        break;
      }
  return out;
}

Spectrum Spectrum::simplified() const {
  Spectrum s(domain_);
  for (const auto& p : pieces_) {
    TermMap t;
    for (const auto& [kappa, c] : p.terms)
      if (!c.is_exact_zero()) t.emplace(kappa, c);
    if (t.empty()) continue;
    s.pieces_.push_back(Piece{p.box, std::move(t)});
  }
  sort_pieces(s.pieces_);
  if (domain_.dimension != 1 || s.pieces_.empty()) return s;
  auto same_terms = [](const TermMap& x, const TermMap& y) {
    if (x.size() != y.size()) return false;
    for (auto i = x.begin(), j = y.begin(); i != x.end(); ++i, ++j)
      if (i->first != j->first || !identical(i->second, j->second)) return false;
    return true;
  };
  std::vector<Piece> merged{s.pieces_.front()};
  for (std::size_t i = 1; i < s.pieces_.size(); ++i) {
    Piece& last = merged.back();
    if (last.box[0].hi == s.pieces_[i].box[0].lo && same_terms(last.terms, s.pieces_[i].terms))
      last.box[0].hi = s.pieces_[i].box[0].hi;
    else
      merged.push_back(s.pieces_[i]);
  }
  s.pieces_ = std::move(merged);
  return s;
}

}  // namespace gsi
