#pragma once

#include "mammo/core.hpp"

namespace mammo {

/// 8-connected component labeling of a binary raster. Labels are assigned in
/// raster-scan order of each component's first pixel, starting at 1;
/// background stays 0. Returns the label raster and the component count.
struct ComponentLabels {
    LabelArray labels;
    int count = 0;
};

ComponentLabels connected_components(const Mask& mask);

}  // namespace mammo
