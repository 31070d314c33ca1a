#pragma once

#include "mammo/core.hpp"

namespace mammo {

/// Maps any supported image onto the common 8-bit working format.
/// 8-bit input is returned unchanged. 16-bit input is rescaled linearly from
/// its [min, max] onto [0, 255] with round-half-up; a constant image maps
/// to 0. The operation is idempotent.
GrayImage standardize(const GrayImage& img);

/// Intensity histogram of an 8-bit image, optionally restricted to mask
/// foreground. Throws DimensionMismatch when the mask shape differs.
Histogram histogram(const GrayImage& img, const Mask* mask = nullptr);

/// Two-class discriminant threshold: maximizes the between-class variance of
/// the split [0..t] vs [t+1..255]. Ties resolve to the lowest t.
int otsu_threshold(const Histogram& h);

/// Breast-region mask: pixels above the global discriminant threshold,
/// reduced to the largest 8-connected component so film labels and markers
/// drop out. Throws EmptyImage for an all-zero input.
BreastMask breast_mask(const GrayImage& img);

}  // namespace mammo
