#pragma once

#include "mammo/core.hpp"

#include <vector>

namespace mammo {

struct PyramidLevel {
    int level_index = 0;
    GrayImage image;
    int scale_factor = 1;  // 2^level_index relative to full resolution
};

/// Gaussian pyramid with the 5-tap binomial kernel [1,4,6,4,1]/16 applied
/// separably (mirrored borders), followed by dropping every second row and
/// column. `levels` counts level 0, so levels=3 on a 64x64 input yields
/// 64, 32, 16. Throws TooManyLevels when the top level would shrink below
/// 8x8.
std::vector<PyramidLevel> gaussian_pyramid(const GrayImage& img, int levels);

}  // namespace mammo
