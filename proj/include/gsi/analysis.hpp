#pragma once

// w-functions, their Fourier coefficients, t_alpha, Calderon sums,
// bandwidth, means and the UCP / LIC diagnostics of a GSI system.
//
// For a test function f and layer j
//
//   w_j(x) = sum_{gamma in Gamma_j} <T_x f, T_gamma g_j> <T_gamma h_j, T_x f>
//          = sum_{alpha in Gamma_j^perp} d_{j,alpha} exp(2 pi i <alpha, x>)
//
//   d_{j,alpha} = 1/covol(Gamma_j) * int f^(w) conj(g_j^(w) f^(w+alpha)) h_j^(w+alpha) dw
//   t_alpha(w)  = sum_{j : alpha in Gamma_j^perp} 1/covol(Gamma_j) conj(g_j^(w)) h_j^(w+alpha)

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gsi/spectrum.hpp"
#include "gsi/system.hpp"

namespace gsi {

/// sum_alpha c_alpha <alpha, x>, evaluated on the time-side group `model`.
struct TrigPolynomial {
  GroupModel model;
  std::map<GroupPoint, Scalar> terms;

  Scalar evaluate(const GroupPoint& x) const;
  /// Coefficient of the zero frequency.
  Scalar constant() const;
  TrigPolynomial& operator+=(const TrigPolynomial& other);
  friend TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b) { return a += b; }
  /// Drops exact-zero coefficients.
  void prune();
};

/// Spectra of every stored layer, computed once.
struct SystemSpectra {
  SpectralDomain domain;
  std::vector<Spectrum> g;
  std::vector<Spectrum> h;
  std::vector<Rational> covol;
  std::vector<Lattice> duals;
};

SystemSpectra prepare(const GsiSystem& system);

/// A contribution of the symbolic tail: either its exact value or an upper
/// bound for its modulus.
struct TailValue {
  Scalar value;
  bool exact = false;
};

Scalar d_coefficient(const GsiSystem& system, const TestFunction& f, std::size_t j, const GroupPoint& alpha);

/// Every alpha in Gamma_j^perp whose coefficient can be nonzero for f.
std::vector<GroupPoint> alpha_candidates(const GsiSystem& system, const TestFunction& f, std::size_t j);

TrigPolynomial w_layer(const GsiSystem& system, const TestFunction& f, std::size_t j);
/// Sum over `subset` (default: all stored layers).
TrigPolynomial w_total(const GsiSystem& system, const TestFunction& f,
                       const std::optional<std::vector<std::size_t>>& subset = std::nullopt);

/// sum_j 1/covol(Gamma_j) |g_j^|^2 over the stored layers.
Spectrum calderon_spectrum(const GsiSystem& system);
/// Contribution of the tail to the Calderon sum (exact for constant modulus).
std::optional<TailValue> calderon_tail(const GsiSystem& system);
/// Stored layers plus the exact tail when there is one.
Scalar calderon_sum(const GsiSystem& system, const GroupPoint& omega);

struct TAlpha {
  GroupPoint alpha;
  std::vector<std::size_t> layers;  // stored layers with alpha in their dual
  Spectrum values;                  // stored layers only
  std::optional<TailValue> tail;    // exact constant for alpha = 0, else a bound
};

/// Throws FrequencyNotInAnyDualLattice when no layer (stored or tail) can
/// contain alpha.
TAlpha t_alpha(const GsiSystem& system, const GroupPoint& alpha);
TAlpha t_alpha(const GsiSystem& system, const SystemSpectra& spectra, const GroupPoint& alpha);

/// All alpha (including 0) with some layer's conj(g^) h^(. + alpha) not
/// identically zero; sorted.
std::vector<GroupPoint> relevant_alphas(const GsiSystem& system, const SystemSpectra& spectra);

struct Bandwidth {
  Rational prefix{0};
  std::optional<Rational> total;  // prefix plus closed-form tail
  bool infinite = false;
};

Bandwidth bandwidth(const std::vector<Lattice>& lattices);
Bandwidth bandwidth(const GsiSystem& system);
/// The family covol_j = first * ratio^(j-1), j >= 1.
Bandwidth geometric_bandwidth(const Rational& first_covolume, const Rational& ratio);

struct MeanEstimate {
  std::optional<Scalar> exact;
  std::vector<std::pair<long, std::complex<double>>> windowed;
  bool converged = false;

  std::complex<double> value() const;
};

using SampledFunction = std::function<std::complex<double>(const GroupPoint&)>;

/// Windows n = 16, 32, ..., 4096.
std::vector<long> default_window_schedule();

MeanEstimate mean_exact(const TrigPolynomial& p);
/// Averages over H_n = [-n, n] (Z, R) or all of G (finite groups); Cauchy
/// tolerance 1e-4 between consecutive windows.  Throws NonEvaluable for
/// models without a window scheme.
MeanEstimate mean_windowed(const SampledFunction& p, const GroupModel& model,
                           const std::vector<long>& schedule = default_window_schedule());

struct UcpEntry {
  std::size_t prefix;
  Scalar residual;
};

struct UcpReport {
  Scalar target;
  std::string method;  // "exact-constant-term" or "windowed"
  std::vector<UcpEntry> entries;
  std::optional<Scalar> limit;
  UcpStatus status = UcpStatus::Unknown;
};

/// Mean of |w_total(all) - w_total(first m layers)| for each m in
/// `prefixes`.  The full w_total is the supplied target (||f||^2 times the
/// frame bound for claimed ONB / Parseval systems) or computed for finite
/// families.  Throws TargetUnknown otherwise.
UcpReport ucp_residual(const GsiSystem& system, const TestFunction& f, const std::vector<std::size_t>& prefixes,
                       const std::optional<Scalar>& target = std::nullopt);

struct LicCoefficients {
  Scalar c;
  Scalar c_tilde;
  double d_abs = 0;
};

LicCoefficients lic_coefficients(const GsiSystem& system, const TestFunction& f, std::size_t j,
                                 const GroupPoint& alpha);
/// sum_{alpha} c~_{j,alpha} for one layer.
Scalar lic_layer_sum(const GsiSystem& system, const TestFunction& f, std::size_t j);

}  // namespace gsi
