#pragma once

#include "sphrs/projections.hpp"

namespace sphrs::detail {

/// Sign-exact orientation test: > 0 if (a, b, c) turn counterclockwise,
/// < 0 if clockwise, 0 if collinear. Magnitude is only approximate.
double orient2d(PixelCoord a, PixelCoord b, PixelCoord c) noexcept;

/// Sign-exact in-circle test for counterclockwise (a, b, c): > 0 if d lies
/// strictly inside their circumcircle, 0 on it, < 0 outside.
double incircle(PixelCoord a, PixelCoord b, PixelCoord c, PixelCoord d) noexcept;

}  // namespace sphrs::detail
