#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "cpn/precision.hpp"

namespace cpn {

using Rng = std::mt19937_64;

// Bit-level mapping so draws are identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform (by area) in the annulus rmin <= |z| <= rmax.
inline cplx random_in_annulus(Rng& rng, double rmin, double rmax) {
  const double r = std::sqrt(rmin * rmin + uniform01(rng) * (rmax * rmax - rmin * rmin));
  const double t = 2.0 * std::numbers::pi * uniform01(rng);
  return std::polar(r, t);
}

inline cplx random_in_disc(Rng& rng, double radius = 1.0) { return random_in_annulus(rng, 0.0, radius); }

} // namespace cpn
