#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gsi/error.hpp"
#include "gsi/generator.hpp"
#include "gsi/geometry.hpp"
#include "gsi/spectrum.hpp"

using namespace gsi;

namespace {

using cd = std::complex<double>;

Box interval(Rational a, Rational b) { return Box{Interval{a, b}}; }
Rational q(long a, long b) { return ratio(a, b); }

// Naive DFT written independently of the library.
std::vector<cd> naive_dft(const std::vector<cd>& f) {
  std::size_t m = f.size();
  std::vector<cd> out(m);
  for (std::size_t w = 0; w < m; ++w)
    for (std::size_t x = 0; x < m; ++x)
      out[w] += f[x] * std::polar(1.0, -2.0 * std::numbers::pi * double(x * w) / double(m));
  return out;
}

DenseVector random_dense(std::mt19937& rng, long m) {
  std::normal_distribution<double> n(0, 1);
  DenseVector d{Domain::Time, {}};
  for (long i = 0; i < m; ++i) d.values.push_back(Scalar(cd(n(rng), n(rng))));
  return d;
}

}  // namespace

TEST_CASE("box algebra") {
  Box a{Interval{0, 2}, Interval{0, 2}};
  Box b{Interval{1, 3}, Interval{1, 3}};
  auto pieces = subtract(a, b);
  Rational v(0);
  for (const auto& p : pieces) v += volume(p);
  CHECK(v == 3);
  BoxSet s{{a}};
  CHECK(volume(subtract(s, BoxSet{{b}})) == 3);
  CHECK(volume(unite(s, BoxSet{{b}})) == 7);
  auto w = wrap_periodic(interval(q(3, 4), q(5, 4)), Rational(1));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == interval(q(3, 4), Rational(1)));
  CHECK(w[1] == interval(Rational(0), q(1, 4)));
}

TEST_CASE("fourier of the unit impulse on Z_4") {
  GroupModel z4 = GroupModel::cyclic(4);
  auto delta = std::get<DenseVector>(unit_impulse(z4));
  DenseVector hat = fourier(delta, Direction::Forward, z4);
  for (const auto& v : hat.values) {
    REQUIRE(v.exact_real());
    CHECK(*v.exact_real() == 1);
  }
  DenseVector back = fourier(hat, Direction::Inverse, z4);
  CHECK(*back.values[0].exact_real() == 1);
  for (int i = 1; i < 4; ++i) CHECK(back.values[i].is_exact_zero());
}

TEST_CASE("Plancherel on Z_4 for the constant vector") {
  GroupModel z4 = GroupModel::cyclic(4);
  DenseVector f{Domain::Time, std::vector<Scalar>(4, Scalar(q(1, 2)))};
  CHECK(*norm_squared(f, z4).exact_real() == 1);
  std::vector<cd> raw(4, cd(0.5, 0));
  auto oracle = naive_dft(raw);
  double energy = 0;
  for (auto z : oracle) energy += std::norm(z) / 4.0;
  CHECK(energy == doctest::Approx(1.0).epsilon(1e-15));
  DenseVector hat = fourier(f, Direction::Forward, z4);
  Rational exact_energy(0);
  for (const auto& v : hat.values) exact_energy += *v.norm_sq().exact_real();
  CHECK(exact_energy / 4 == 1);
  for (int w = 0; w < 4; ++w) CHECK(std::abs(hat.values[w].value() - oracle[w]) < 1e-15);
}

TEST_CASE("DFT matches the naive oracle and round-trips") {
  std::mt19937 rng(1);
  for (long m : {5L, 8L, 12L, 16L}) {
    GroupModel g = GroupModel::cyclic(m);
    DenseVector f = random_dense(rng, m);
    std::vector<cd> raw;
    for (const auto& v : f.values) raw.push_back(v.value());
    auto oracle = naive_dft(raw);
    DenseVector hat = fourier(f, Direction::Forward, g);
    for (long w = 0; w < m; ++w) CHECK(std::abs(hat.values[w].value() - oracle[w]) < 1e-12);
    DenseVector back = fourier(hat, Direction::Inverse, g);
    for (long x = 0; x < m; ++x) CHECK(std::abs(back.values[x].value() - raw[x]) < 1e-12);
    double lhs = norm_squared(f, g).value().real();
    double rhs = norm_squared(hat, g).value().real();
    CHECK(std::abs(lhs - rhs) < 1e-10 * lhs);
  }
}

TEST_CASE("translation becomes modulation") {
  std::mt19937 rng(2);
  GroupModel g = GroupModel::cyclic(12);
  for (int trial = 0; trial < 10; ++trial) {
    DenseVector f = random_dense(rng, 12);
    long gamma = static_cast<long>(rng() % 12);
    Spectrum lhs = spectrum(translate(f, {Rational(gamma)}, g), g);
    Spectrum base = spectrum(f, g);
    for (long w = 0; w < 12; ++w) {
      cd expected = std::conj(character_value(g, {Rational(gamma)}, {Rational(w)})) * base.value({Rational(w)});
      CHECK(std::abs(lhs.value({Rational(w)}) - expected) < 1e-12);
    }
  }
  GroupModel z = GroupModel::integers();
  FiniteSequence s{Integer(-1), {Scalar(Rational(2)), Scalar(Rational(-1)), Scalar(q(1, 3))}};
  Spectrum shifted = spectrum(translate(s, {Rational(5)}, z), z);
  Spectrum base = spectrum(s, z);
  for (Rational w : {q(0, 1), q(1, 7), q(2, 5)}) {
    cd expected = std::conj(character_value(z, {Rational(5)}, {w})) * base.value({w});
    CHECK(std::abs(shifted.value({w}) - expected) < 1e-12);
  }
}

TEST_CASE("sequences round-trip exactly through their spectrum") {
  GroupModel z = GroupModel::integers();
  FiniteSequence s{Integer(-2), {Scalar(q(1, 2)), Scalar(Rational(0)), Scalar(q(-3, 4)), Scalar(Rational(5))}};
  FiniteSequence back = inverse_fourier_sequence(spectrum(s, z));
  CHECK(back.start == -2);
  REQUIRE(back.values.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(identical(back.values[k], s.values[k]));
  CHECK(*norm_squared(s, z).exact_real() == q(1, 4) + q(9, 16) + 25);
  Spectrum sp = spectrum(s, z);
  CHECK(*(sp.conj() * sp).integral().exact_real() == q(1, 4) + q(9, 16) + 25);
}

TEST_CASE("exponential integrals") {
  CHECK(exponential_integral(interval(0, 1), {Rational(3)}).is_exact_zero());
  CHECK(*exponential_integral(interval(0, q(1, 2)), {Rational(0)}).exact_real() == q(1, 2));
  cd v = exponential_integral(interval(0, q(1, 2)), {Rational(1)}).value();
  CHECK(std::abs(v - cd(0, -1.0 / std::numbers::pi)) < 1e-15);
}

TEST_CASE("box spectra on R") {
  GroupModel r = GroupModel::reals(1);
  BoxSpectrum b{{{interval(q(-1, 2), q(1, 2)), Scalar(Rational(1))}}, {}};
  CHECK(*norm_squared(b, r).exact_real() == 1);
  // sinc(x) = sin(pi x) / (pi x)
  CHECK(std::abs(inverse_fourier_at(b, {q(1, 2)}) - cd(2 / std::numbers::pi, 0)) < 1e-14);
  CHECK_THROWS_AS(fourier(Generator(b), Direction::Inverse, r), GsiError);
}

TEST_CASE("spectrum arithmetic") {
  SpectralDomain t = SpectralDomain::dual_of(GroupModel::integers());
  Spectrum a = Spectrum::piecewise_constant(t, {{interval(0, q(1, 2)), Scalar(Rational(1))}});
  Spectrum b = Spectrum::piecewise_constant(t, {{interval(q(1, 4), 1), Scalar(Rational(2))}});
  Spectrum s = Spectrum::sum({a, b}, t).simplified();
  CHECK(s.pieces().size() == 3);
  CHECK(*s.at({q(3, 8)}).exact_real() == 3);
  CHECK(*(a * b).integral().exact_real() == q(1, 2));
  Spectrum shifted = a.shifted({q(3, 4)});
  CHECK(*shifted.at({q(1, 8)}).exact_real() == 0);
  CHECK(*shifted.at({q(3, 8)}).exact_real() == 1);
  CHECK(*shifted.at({q(7, 8)}).exact_real() == 0);
  CHECK(*shifted.integral().exact_real() == q(1, 2));
  Spectrum root = Spectrum::piecewise_constant(t, {{interval(0, 1), Scalar::sqrt_of(Rational(2))}});
  CHECK(*(root.conj() * root).integral().exact_real() == 2);
}

TEST_CASE("test functions avoid the blind spot") {
  GroupModel z = GroupModel::integers();
  BoxSpectrum b{{{interval(q(1, 4), q(1, 2)), Scalar(Rational(1))}}, {}};
  CHECK_NOTHROW(validate_test_function({b, {{q(3, 4)}}}, z));
  CHECK_THROWS_AS(validate_test_function({b, {{q(1, 2)}}}, z), GsiError);
  CHECK_THROWS_AS(validate_test_function({unit_impulse(z), {{q(1, 2)}}}, z), GsiError);
}
