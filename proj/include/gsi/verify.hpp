#pragma once

// Frame verdicts: dense frame operators and optimal bounds on Z_M, Parseval
// and dual-pair certification through the t_alpha equations, audits of the
// necessary conditions, and the independence gate for cZ / cZ_M families.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsi/analysis.hpp"
#include "gsi/system.hpp"

namespace gsi {

enum class Verdict { Pass, Fail, NotApplicable, NotCertified };

const char* to_string(Verdict v);

struct Witness {
  std::string kind;  // "cell", "alpha", "eigenvector", "layer"
  std::optional<GroupPoint> alpha;
  std::optional<Box> cell;
  std::optional<std::size_t> layer;
  std::optional<Scalar> value;
  std::vector<std::complex<double>> vector;
  std::string detail;
};

struct VerdictEntry {
  Verdict verdict = Verdict::NotApplicable;
  std::string license;  // what licenses the verdict
  std::vector<Witness> witnesses;
};

struct FrameBounds {
  double lower = 0;
  double upper = 0;
  /// Enclosure: lower_enclosure <= A and B <= upper_enclosure.
  Rational lower_enclosure{0};
  Rational upper_enclosure{0};
  double residual = 0;  // max ||S v - lambda v||
  std::string method;   // "dense-eigen", "claimed", "supplied"
  std::optional<bool> bracket_ok;
  std::vector<std::complex<double>> lower_eigenvector;
};

struct AuditEntry {
  std::string name;
  std::string inequality;  // instantiated with numbers
  Verdict verdict = Verdict::NotApplicable;
  bool prefix_only = false;
  std::vector<Witness> witnesses;
};

struct FrameReport {
  std::string label;
  std::map<std::string, VerdictEntry> verdicts;  // parseval, dual_pair, bessel, frame, independence, onb_shape
  std::optional<FrameBounds> bounds;
  std::vector<AuditEntry> audits;
  UcpStatus ucp = UcpStatus::Unknown;
  std::string form;  // "general" or "independent-duals"
  bool ucp_violation_evidence = false;
  std::vector<std::string> notes;

  /// 0 when every decided verdict passes, 2 on any failure, 3 when
  /// something could not be certified.
  int exit_code() const;
};

struct VerifyOptions {
  double tolerance = 1e-10;
  /// Coverage region for R^n systems.
  std::optional<Box> region;
  /// Overrides the UCP status otherwise derived from the system.
  std::optional<UcpStatus> ucp;
};

/// S = sum_{j, gamma} <., T_gamma g_j> T_gamma h_j on Z_M (h = g for
/// self-dual systems, or for `analysis_only`).  Throws UnsupportedModel or
/// ModelTooLarge.
Eigen::MatrixXcd frame_operator(const GsiSystem& system, bool analysis_only = false);

/// Extreme eigenvalues of the analysis frame operator, with an enclosure and
/// the bracketing cross-check against w_total(f)(0) for `samples` random
/// unit vectors.
FrameBounds optimal_bounds(const GsiSystem& system, std::size_t samples = 200, unsigned seed = 1);

/// UCP status of the system: automatic for finite families, from the
/// residual limit for tails with a claimed target, declared, or unknown.
UcpStatus derive_ucp(const GsiSystem& system, const VerifyOptions& options = {});

FrameReport check_parseval(const GsiSystem& system, const VerifyOptions& options = {});
FrameReport check_dual_pair(const GsiSystem& system, const VerifyOptions& options = {});
FrameReport audit_necessary(const GsiSystem& system, const std::optional<FrameBounds>& bounds = std::nullopt,
                            const VerifyOptions& options = {});
/// Throws UnsupportedModel unless every lattice is cZ or cZ_M.
FrameReport independence_gate(const GsiSystem& system, const VerifyOptions& options = {});

}  // namespace gsi
