#pragma once

#include "skelrepair/raster.hpp"

namespace skelrepair {

/// Exact squared Euclidean distance from every pixel to the nearest foreground
/// pixel of `mask` (separable lower-envelope transform of Felzenszwalb and
/// Huttenlocher). Pixels are +inf when the mask is empty.
Raster<double> squared_distance_transform(const BinaryMask& mask);

}  // namespace skelrepair
