#include "mammo/glcm.hpp"

#include <algorithm>

namespace mammo {

CooccurrenceMatrix build_glcm(const GrayImage& img, const Mask* mask) {
    if (img.bit_depth != 8) throw Error("build_glcm: image must be 8-bit");
    if (mask && (mask->rows() != img.pixels.rows() || mask->cols() != img.pixels.cols()))
        throw DimensionMismatch("build_glcm: mask dimensions differ from image");

    const int rows = img.height(), cols = img.width();
    static constexpr int dr[4] = {0, -1, -1, -1};  // 0, 45, 90, 135 degrees
    static constexpr int dc[4] = {1, 1, 0, -1};

    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(256, 256);
    std::int64_t total = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (mask && (*mask)(r, c) == 0) continue;
            const int s = img.pixels(r, c);
            for (int k = 0; k < 4; ++k) {
                const int tr = r + dr[k];
                const int tc = c + dc[k];
                if (tr < 0 || tr >= rows || tc < 0 || tc >= cols) continue;
                if (mask && (*mask)(tr, tc) == 0) continue;
                ++counts(s, img.pixels(tr, tc));
                ++total;
            }
        }
    }
    if (total == 0) throw EmptyOverlap("build_glcm: no valid pixel pair");

    CooccurrenceMatrix cm;
    cm.pair_count = total;
    cm.entries = counts.cast<double>() / static_cast<double>(total);
    return cm;
}

double cluster_cooccurrence(const CooccurrenceMatrix& cm, GrayRange range_i, GrayRange range_j) {
    auto bad = [](GrayRange g) { return g.lo > g.hi || g.lo < 0 || g.hi > 255; };
    if (bad(range_i) || bad(range_j))
        throw InvalidRange("cluster_cooccurrence: range empty or out of bounds");
    if (range_i.hi >= range_j.lo && range_j.hi >= range_i.lo)
        throw InvalidRange("cluster_cooccurrence: ranges overlap");

    const double block =
        cm.entries.block(range_i.lo, range_j.lo, range_i.width(), range_j.width()).sum();
    return std::clamp(block / range_i.width(), 0.0, 1.0);
}

}  // namespace mammo
