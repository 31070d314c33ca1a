#pragma once

#include "mammo/core.hpp"

namespace mammo {

/// Inclusive gray-level interval [lo, hi].
struct GrayRange {
    int lo = 0;
    int hi = 0;
    int width() const { return hi - lo + 1; }
};

/// 256x256 gray-level co-occurrence matrix, normalized so entries sum to 1.
struct CooccurrenceMatrix {
    Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(256, 256);
    std::int64_t pair_count = 0;
};

/// Builds the co-occurrence matrix at distance 1 over the four offsets
/// (0,+1), (-1,+1), (-1,0), (-1,-1) as (row,col) deltas. Counts from all
/// offsets are summed and normalized by the total pair count. When a mask is
/// given, both endpoints of a pair must lie inside it. No symmetrization is
/// applied. Throws EmptyOverlap when no valid pair exists.
CooccurrenceMatrix build_glcm(const GrayImage& img, const Mask* mask = nullptr);

/// Normalized co-occurrence frequency between two disjoint gray-level
/// ranges: the block sum of entries over range_i x range_j divided by the
/// width of range_i, clamped to [0, 1]. Throws InvalidRange for empty,
/// overlapping or out-of-bounds ranges.
double cluster_cooccurrence(const CooccurrenceMatrix& cm, GrayRange range_i, GrayRange range_j);

}  // namespace mammo
