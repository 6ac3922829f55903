#include "gsi/system.hpp"

#include "gsi/error.hpp"

namespace gsi {

const char* to_string(UcpStatus status) {
  switch (status) {
    case UcpStatus::Automatic: return "automatic";
    case UcpStatus::Evidenced: return "evidenced";
    case UcpStatus::Declared: return "declared";
    case UcpStatus::Violated: return "violated";
    case UcpStatus::Unknown: return "unknown";
  }
  return "unknown";
}

UcpStatus parse_ucp_status(const std::string& text) {
  for (auto s : {UcpStatus::Automatic, UcpStatus::Evidenced, UcpStatus::Declared, UcpStatus::Violated,
                 UcpStatus::Unknown})
    if (text == to_string(s)) return s;
  throw GsiError(ErrorCode::InvalidInput, "unknown UCP status '" + text + "'");
}

bool GsiSystem::is_dual() const {
  return !layers.empty() && layers.front().h.has_value();
}

void GsiSystem::validate() const {
  for (std::size_t j = 0; j < layers.size(); ++j) {
    const Layer& layer = layers[j];
    if (!(layer.lattice.ambient == model))
      throw GsiError(ErrorCode::IncompatibleAmbient, "layer " + std::to_string(j) + " lattice lives in " +
                                                         layer.lattice.ambient.name() + ", not " + model.name());
    if (layer.h.has_value() != is_dual())
      throw GsiError(ErrorCode::InvalidInput, "either every layer or no layer has a synthesis generator");
    spectrum(layer.g, model);
    if (layer.h) spectrum(*layer.h, model);
  }
  if (tail) {
    if (layers.empty()) throw GsiError(ErrorCode::InvalidInput, "a tail needs at least one stored layer");
    if (tail->ratio <= 1) throw GsiError(ErrorCode::InvalidInput, "tail ratio must exceed 1");
    if (tail->generator_sq < 0) throw GsiError(ErrorCode::InvalidInput, "negative generator bound");
    if (is_dual()) throw GsiError(ErrorCode::InvalidInput, "tails are supported for self-dual systems only");
  }
}

}  // namespace gsi
