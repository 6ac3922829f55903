#pragma once

// Generator descriptions and the Fourier transform between time and
// frequency side.
//
// Conventions (all groups): f^(omega) = integral f(x) conj(<x, omega>) dx.
//   Z_M : f^(w) = sum_x f(x) e^{-2 pi i x w / M},  f(x) = (1/M) sum_w f^(w) e^{2 pi i x w / M}
//   Z   : f^(w) = sum_n f(n) e^{-2 pi i n w},      w in [0, 1)
//   R^n : f^(w) = int f(x) e^{-2 pi i <x, w>} dx

#include <complex>
#include <variant>
#include <vector>

#include "gsi/group_model.hpp"
#include "gsi/spectrum.hpp"

namespace gsi {

enum class Domain { Time, Frequency };

/// Values over Z_M, either f(0..M-1) or f^(0..M-1).
struct DenseVector {
  Domain domain = Domain::Time;
  std::vector<Scalar> values;
};

/// Finitely supported sequence on Z: f(start + k) = values[k].
struct FiniteSequence {
  Integer start{0};
  std::vector<Scalar> values;
};

/// f^(omega) = exp(-2 pi i <shift, omega>) * sum_i c_i 1_{B_i}(omega) with
/// disjoint rational boxes.  On T the boxes lie in [0, 1) and the shift is an
/// integer.
struct BoxSpectrum {
  std::vector<std::pair<Box, Scalar>> boxes;
  RatVector shift;
};

using Generator = std::variant<DenseVector, FiniteSequence, BoxSpectrum>;

/// An element of the test space: bounded spectrum with compact support
/// avoiding the blind spot (a finite set of dual points).
struct TestFunction {
  Generator f;
  std::vector<GroupPoint> blind_spot;
};

enum class Direction { Forward, Inverse };

const char* variant_name(const Generator& g);

/// The spectrum g^ as a function on the dual group of `model`.  Throws
/// VariantMismatch when the variant does not belong to the model.
Spectrum spectrum(const Generator& g, const GroupModel& model);

/// DFT between the time and frequency representation of a DenseVector.
DenseVector fourier(const DenseVector& v, Direction direction, const GroupModel& model);
/// Generic entry point: DenseVector <-> DenseVector on Z_M, FiniteSequence ->
/// trigonometric BoxSpectrum-like Spectrum evaluator on T via spectrum().
/// Sequences and box spectra have no finite counterpart on the other side, so
/// anything but DenseVector raises VariantMismatch here.
Generator fourier(const Generator& g, Direction direction, const GroupModel& model);
/// Recovers the coefficients of a trigonometric spectrum on T.
FiniteSequence inverse_fourier_sequence(const Spectrum& s);
/// The time-domain value of a box spectrum at x (closed form integral).
std::complex<double> inverse_fourier_at(const BoxSpectrum& b, const RatVector& x);

/// Time-domain values on Z_M (the DFT inverse of a frequency DenseVector).
std::vector<std::complex<double>> time_values(const Generator& g, const GroupModel& model);

/// T_gamma g, i.e. x -> g(x - gamma).
Generator translate(const Generator& g, const GroupPoint& gamma, const GroupModel& model);

/// ||g||^2, computed on the frequency side (Plancherel).
Scalar norm_squared(const Generator& g, const GroupModel& model);

/// Membership in the test space: spectrum support avoids the blind spot.
/// Throws InvalidInput otherwise.
void validate_test_function(const TestFunction& f, const GroupModel& model);

/// delta_0 on Z_M or Z.
Generator unit_impulse(const GroupModel& model);

}  // namespace gsi
