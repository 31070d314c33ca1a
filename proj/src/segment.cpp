#include "mammo/segment.hpp"

#include "mammo/labeling.hpp"

#include <cmath>
#include <limits>

namespace mammo {

std::vector<Mask> threshold_layers(const GrayImage& img, const ThresholdSet& t) {
    std::vector<Mask> layers;
    layers.reserve(t.size());
    for (int tk : t) layers.push_back((img.pixels > tk).cast<std::uint8_t>());
    return layers;
}

std::vector<LabeledRegion> label_components(const Mask& layer) {
    const ComponentLabels cl = connected_components(layer);
    std::vector<LabeledRegion> regions(static_cast<std::size_t>(cl.count));
    for (int i = 0; i < cl.count; ++i) {
        LabeledRegion& r = regions[static_cast<std::size_t>(i)];
        r.label = i + 1;
        r.min_row = static_cast<int>(layer.rows());
        r.min_col = static_cast<int>(layer.cols());
        r.max_row = -1;
        r.max_col = -1;
    }
    for (int row = 0; row < layer.rows(); ++row) {
        for (int col = 0; col < layer.cols(); ++col) {
            const int lab = cl.labels(row, col);
            if (lab == 0) continue;
            LabeledRegion& r = regions[static_cast<std::size_t>(lab - 1)];
            r.pixel_set.emplace_back(row, col);
            ++r.area;
            r.min_row = std::min(r.min_row, row);
            r.min_col = std::min(r.min_col, col);
            r.max_row = std::max(r.max_row, row);
            r.max_col = std::max(r.max_col, col);
        }
    }
    return regions;
}

namespace {

std::pair<double, double> region_centroid(const LabeledRegion& r) {
    double sr = 0.0, sc = 0.0;
    for (const auto& [row, col] : r.pixel_set) {
        sr += row;
        sc += col;
    }
    const double n = static_cast<double>(r.pixel_set.size());
    return {sr / n, sc / n};
}

/// Index of the parent receiving this child's prestige, or -1.
int elect_parent(const LabeledRegion& child, const std::vector<LabeledRegion>& parents,
                 const LabelArray& parent_labels, double coverage, MergeRule rule,
                 double distance_threshold) {
    if (parents.empty()) return -1;
    if (rule == MergeRule::Coverage) {
        // Nesting puts the whole child inside one parent component, so a
        // single overlap counter per parent suffices.
        std::vector<std::int64_t> overlap(parents.size(), 0);
        for (const auto& [row, col] : child.pixel_set) {
            const int lab = parent_labels(row, col);
            if (lab > 0) ++overlap[static_cast<std::size_t>(lab - 1)];
        }
        int best = -1;
        std::int64_t best_overlap = 0;
        for (std::size_t p = 0; p < parents.size(); ++p) {
            if (overlap[p] > best_overlap) {
                best_overlap = overlap[p];
                best = static_cast<int>(p);
            }
        }
        if (best < 0) return -1;
        const double frac = static_cast<double>(best_overlap) / static_cast<double>(child.area);
        return frac >= coverage ? best : -1;
    }
    // Legacy variant: nearest parent by centroid distance, normalized by the
    // parent's equivalent-circle radius.
    const auto [cr, cc] = region_centroid(child);
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < parents.size(); ++p) {
        const auto [pr, pc] = region_centroid(parents[p]);
        const double radius = std::sqrt(static_cast<double>(parents[p].area) / M_PI);
        const double d = std::hypot(cr - pr, cc - pc) / radius;
        if (d < best_dist) {
            best_dist = d;
            best = static_cast<int>(p);
        }
    }
    return best_dist < distance_threshold ? best : -1;
}

}  // namespace

std::vector<LabeledRegion> accumulate_prestige(const std::vector<std::vector<LabeledRegion>>& levels,
                                               int rows, int cols, double coverage,
                                               int min_prestige, MergeRule rule,
                                               double distance_threshold) {
    std::vector<std::vector<LabeledRegion>> work = levels;
    LabelArray parent_labels(rows, cols);
    for (std::size_t i = 0; i + 1 < work.size(); ++i) {
        std::vector<LabeledRegion>& parents = work[i + 1];
        parent_labels.setZero();
        for (std::size_t p = 0; p < parents.size(); ++p)
            for (const auto& [row, col] : parents[p].pixel_set)
                parent_labels(row, col) = static_cast<int>(p) + 1;
        for (const LabeledRegion& child : work[i]) {
            const int p = elect_parent(child, parents, parent_labels, coverage, rule,
                                       distance_threshold);
            if (p >= 0) parents[static_cast<std::size_t>(p)].prestige += child.prestige;
        }
    }
    std::vector<LabeledRegion> retained;
    for (auto it = work.rbegin(); it != work.rend(); ++it)
        for (const LabeledRegion& r : *it)
            if (r.prestige >= min_prestige) retained.push_back(r);
    return retained;
}

RoiCandidate upsample_roi(const LabeledRegion& region, int pyramid_depth, int full_rows,
                          int full_cols) {
    const int f = 1 << pyramid_depth;
    RoiCandidate roi;
    roi.mask = Mask::Zero(full_rows, full_cols);
    for (const auto& [row, col] : region.pixel_set) {
        const int r0 = row * f, c0 = col * f;
        const int r1 = std::min(r0 + f, full_rows), c1 = std::min(c0 + f, full_cols);
        for (int r = r0; r < r1; ++r)
            for (int c = c0; c < c1; ++c) roi.mask(r, c) = 1;
    }
    roi.min_row = full_rows;
    roi.min_col = full_cols;
    roi.max_row = -1;
    roi.max_col = -1;
    double sr = 0.0, sc = 0.0;
    std::int64_t n = 0;
    for (int r = 0; r < full_rows; ++r) {
        for (int c = 0; c < full_cols; ++c) {
            if (!roi.mask(r, c)) continue;
            sr += r;
            sc += c;
            ++n;
            roi.min_row = std::min(roi.min_row, r);
            roi.min_col = std::min(roi.min_col, c);
            roi.max_row = std::max(roi.max_row, r);
            roi.max_col = std::max(roi.max_col, c);
        }
    }
    roi.centroid_row = sr / static_cast<double>(n);
    roi.centroid_col = sc / static_cast<double>(n);
    roi.prestige = region.prestige;
    roi.level_index = region.level_index;
    return roi;
}

}  // namespace mammo
