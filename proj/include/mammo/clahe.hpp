#pragma once

#include "mammo/core.hpp"

#include <array>

namespace mammo {

/// Clipped-histogram equalization mapping for one tile. `clip_limit` is
/// relative to the uniform bin height (npixels/256); clipped excess is
/// redistributed uniformly over all bins. The returned lookup table is
/// nondecreasing.
std::array<std::uint8_t, 256> equalize_lut(const Eigen::Array<std::int64_t, 256, 1>& counts,
                                           double clip_limit);

/// Contrast-limited adaptive histogram equalization on an 8-bit image:
/// per-tile clipped equalization with bilinear interpolation of the tile
/// mapping functions between tile centers. Throws InvalidTiling when the
/// grid would produce tiles smaller than 2x2.
GrayImage clahe(const GrayImage& img, double clip_limit, int tiles_x, int tiles_y);

}  // namespace mammo
