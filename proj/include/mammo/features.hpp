#pragma once

#include "mammo/core.hpp"
#include "mammo/segment.hpp"

#include <Eigen/Dense>

namespace mammo {

struct FeatureVector {
    double region_contrast = 0.0;  // gray levels
    double mean_gradient = 0.0;    // gray levels per pixel
    double entropy = 0.0;          // bits
    double std_dev = 0.0;          // gray levels
    double compactness = 0.0;      // dimensionless, [0,1)

    Eigen::Matrix<double, 5, 1> as_vector() const {
        Eigen::Matrix<double, 5, 1> v;
        v << region_contrast, mean_gradient, entropy, std_dev, compactness;
        return v;
    }
};

struct ShapeStats {
    std::int64_t area = 0;
    double perimeter = 0.0;
};

/// Area and boundary length of the mask. The boundary estimate joins
/// midpoints of the unit cracks between object and background (straight
/// continuations count 1, quarter turns sqrt(2)/2), which keeps rasterized
/// discs within a couple percent of 2*pi*r; chain-code lengths over pixel
/// centers systematically undershoot and would bias compactness.
ShapeStats shape_stats(const Mask& mask);

/// Mean intensity inside the mask minus mean intensity of the surrounding
/// ring: the Chebyshev dilation of the mask by ring_width, minus the mask,
/// intersected with the breast mask. Negative when the region is darker
/// than its surround.
double region_contrast(const GrayImage& img, const RoiCandidate& roi, const BreastMask& breast,
                       int ring_width = 10);

/// Mean gradient magnitude over boundary pixels (mask pixels with a
/// background 4-neighbor), central differences with replicated borders.
double mean_gradient(const GrayImage& img, const RoiCandidate& roi);

/// Shannon entropy in bits of the intensity histogram inside the mask.
double entropy(const GrayImage& img, const RoiCandidate& roi);

/// Population standard deviation of intensities inside the mask.
double std_dev(const GrayImage& img, const RoiCandidate& roi);

/// 1 - 4*pi*A/P^2, clamped to [0,1). 0 = disc-like, near 1 = elongated.
double compactness(const RoiCandidate& roi);
double compactness(const Mask& mask);

FeatureVector extract_features(const GrayImage& img, const RoiCandidate& roi,
                               const BreastMask& breast, int ring_width = 10);

}  // namespace mammo
