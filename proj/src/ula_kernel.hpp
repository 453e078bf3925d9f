#pragma once

#include <cmath>

#include "lgd/types.hpp"

namespace lgd::detail {

// Shared by every chain in the library so the value path of the tangent chain
// in metalearn reproduces lgd_predict bit for bit.
inline void ula_update(Vector& w, const Vector& grad, double step_size, double noise_scale, const Vector& noise) {
  w = w - step_size * grad + noise_scale * noise;
}

inline double noise_scale(double step_size) { return std::sqrt(2.0 * step_size); }

}  // namespace lgd::detail
