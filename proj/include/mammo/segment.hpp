#pragma once

#include "mammo/core.hpp"
#include "mammo/hcluster.hpp"

#include <vector>

namespace mammo {

/// 8-connected object in one threshold layer, at working resolution.
struct LabeledRegion {
    int level_index = 0;  // 1 = lowest density band, m-1 = densest
    int label = 0;
    std::vector<std::pair<int, int>> pixel_set;  // (row, col)
    std::int64_t area = 0;
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;
    int prestige = 1;
};

/// Mass candidate at full resolution.
struct RoiCandidate {
    Mask mask;
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;
    double centroid_row = 0.0, centroid_col = 0.0;
    int prestige = 1;
    int level_index = 0;
};

/// How a child region elects the parent that receives its prestige.
/// Coverage is the resolved rule (parent must cover >= the coverage fraction
/// of the child); CentroidDistance keeps the alternative formulation, with
/// the child-to-parent centroid distance normalized by the parent's
/// equivalent-circle radius compared against the same threshold.
enum class MergeRule { Coverage, CentroidDistance };

/// Nested binary layers: layer k keeps pixels with intensity strictly above
/// t_k, so layer k+1 is always contained in layer k.
std::vector<Mask> threshold_layers(const GrayImage& img, const ThresholdSet& t);

/// Labels 8-connected components of one layer in raster-scan order; every
/// region starts with prestige 1.
std::vector<LabeledRegion> label_components(const Mask& layer);

/// Prestige accumulation over nested layers, densest first: each region
/// forwards its prestige to the unique region one level out that covers at
/// least `coverage` of it. Regions whose final prestige reaches
/// `min_prestige` survive. `rows`/`cols` give the working-raster shape.
std::vector<LabeledRegion> accumulate_prestige(const std::vector<std::vector<LabeledRegion>>& levels,
                                               int rows, int cols, double coverage = 0.8,
                                               int min_prestige = 3,
                                               MergeRule rule = MergeRule::Coverage,
                                               double distance_threshold = 0.2);

/// Maps a working-resolution region to full resolution: every working pixel
/// becomes a 2^depth x 2^depth block, clipped to the full image; the
/// centroid is recomputed on the full-resolution mask.
RoiCandidate upsample_roi(const LabeledRegion& region, int pyramid_depth, int full_rows,
                          int full_cols);

}  // namespace mammo
