#pragma once

// A GSI system: a group model and a finite list of layers (Gamma_j, g_j, h_j),
// optionally followed by an infinite geometric tail described symbolically.

#include <optional>
#include <string>
#include <vector>

#include "gsi/generator.hpp"
#include "gsi/lattice.hpp"

namespace gsi {

struct Layer {
  Lattice lattice;
  Generator g;
  std::optional<Generator> h;
};

/// Layers L+1, L+2, ... after the L stored ones: covol(Gamma_{L+k}) =
/// covol(Gamma_L) * ratio^k and |g_j^|^2 <= generator_sq pointwise (equal
/// everywhere when constant_modulus).  Tails are self-dual.
struct GeometricTail {
  Rational ratio;
  Rational generator_sq;
  bool constant_modulus = true;
};

enum class UcpStatus { Automatic, Evidenced, Declared, Violated, Unknown };

const char* to_string(UcpStatus status);
UcpStatus parse_ucp_status(const std::string& text);

/// What the producer of a system asserts about it.  Claims are inputs to the
/// verifiers (for example the target of a UCP residual), never verdicts.
struct Claims {
  bool onb = false;
  bool parseval = false;
  std::optional<UcpStatus> ucp;
};

struct GsiSystem {
  std::string label;
  GroupModel model;
  std::vector<Layer> layers;
  std::optional<GeometricTail> tail;
  Claims claims;

  bool is_dual() const;
  const Generator& synthesis(std::size_t j) const { return layers[j].h ? *layers[j].h : layers[j].g; }
  /// Checks that all lattices and generators live in the model and that
  /// either every layer or no layer carries h.  Throws InvalidInput or
  /// VariantMismatch.
  void validate() const;
};

}  // namespace gsi
