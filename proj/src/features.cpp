#include "mammo/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mammo {

ShapeStats shape_stats(const Mask& mask) {
    const int rows = static_cast<int>(mask.rows()), cols = static_cast<int>(mask.cols());
    ShapeStats s;
    s.area = static_cast<std::int64_t>(mask.cast<std::int64_t>().sum());
    if (s.area < 4) throw DegenerateShape("region too small for a boundary estimate");
    const auto fg = [&](int r, int c) {
        return r >= 0 && r < rows && c >= 0 && c < cols && mask(r, c) != 0;
    };
    // Walk lattice points; the 2x2 pixel pattern around each point tells how
    // the crack boundary passes through it.
    const double diag = std::sqrt(2.0) / 2.0;
    double perim = 0.0;
    for (int r = 0; r <= rows; ++r) {
        for (int c = 0; c <= cols; ++c) {
            const bool a = fg(r - 1, c - 1), b = fg(r - 1, c), d = fg(r, c - 1), e = fg(r, c);
            const int k = int(a) + int(b) + int(d) + int(e);
            if (k == 1 || k == 3) {
                perim += diag;  // one quarter turn
            } else if (k == 2) {
                if (a == e)
                    perim += std::sqrt(2.0);  // diagonal pinch: two quarter turns
                else
                    perim += 1.0;  // boundary runs straight through
            }
        }
    }
    s.perimeter = perim;
    return s;
}

double region_contrast(const GrayImage& img, const RoiCandidate& roi, const BreastMask& breast,
                       int ring_width) {
    const int rows = img.height(), cols = img.width();
    const int r0 = std::max(0, roi.min_row - ring_width), c0 = std::max(0, roi.min_col - ring_width);
    const int r1 = std::min(rows, roi.max_row + ring_width + 1);
    const int c1 = std::min(cols, roi.max_col + ring_width + 1);
    const int wr = r1 - r0, wc = c1 - c0;
    // Chebyshev dilation is separable: smear rows, then columns.
    Mask horiz = Mask::Zero(wr, wc);
    for (int r = 0; r < wr; ++r)
        for (int c = 0; c < wc; ++c)
            if (roi.mask(r0 + r, c0 + c)) {
                const int lo = std::max(0, c - ring_width), hi = std::min(wc - 1, c + ring_width);
                for (int x = lo; x <= hi; ++x) horiz(r, x) = 1;
            }
    Mask dilated = Mask::Zero(wr, wc);
    for (int r = 0; r < wr; ++r)
        for (int c = 0; c < wc; ++c)
            if (horiz(r, c)) {
                const int lo = std::max(0, r - ring_width), hi = std::min(wr - 1, r + ring_width);
                for (int x = lo; x <= hi; ++x) dilated(x, c) = 1;
            }
    double fg_sum = 0.0, ring_sum = 0.0;
    std::int64_t fg_n = 0, ring_n = 0;
    for (int r = 0; r < wr; ++r) {
        for (int c = 0; c < wc; ++c) {
            const int ir = r0 + r, ic = c0 + c;
            if (roi.mask(ir, ic)) {
                fg_sum += img.pixels(ir, ic);
                ++fg_n;
            } else if (dilated(r, c) && breast(ir, ic)) {
                ring_sum += img.pixels(ir, ic);
                ++ring_n;
            }
        }
    }
    if (ring_n == 0) throw EmptyBackground("no background ring around region");
    return fg_sum / static_cast<double>(fg_n) - ring_sum / static_cast<double>(ring_n);
}

double mean_gradient(const GrayImage& img, const RoiCandidate& roi) {
    const int rows = img.height(), cols = img.width();
    const auto px = [&](int r, int c) {
        r = std::clamp(r, 0, rows - 1);
        c = std::clamp(c, 0, cols - 1);
        return static_cast<double>(img.pixels(r, c));
    };
    const auto inside = [&](int r, int c) {
        return r >= 0 && r < rows && c >= 0 && c < cols && roi.mask(r, c) != 0;
    };
    double sum = 0.0;
    std::int64_t n = 0;
    for (int r = roi.min_row; r <= roi.max_row; ++r) {
        for (int c = roi.min_col; c <= roi.max_col; ++c) {
            if (!roi.mask(r, c)) continue;
            if (inside(r - 1, c) && inside(r + 1, c) && inside(r, c - 1) && inside(r, c + 1))
                continue;
            const double gx = (px(r, c + 1) - px(r, c - 1)) / 2.0;
            const double gy = (px(r + 1, c) - px(r - 1, c)) / 2.0;
            sum += std::hypot(gx, gy);
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

double entropy(const GrayImage& img, const RoiCandidate& roi) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(img.max_value()) + 1, 0);
    std::int64_t total = 0;
    for (int r = roi.min_row; r <= roi.max_row; ++r)
        for (int c = roi.min_col; c <= roi.max_col; ++c)
            if (roi.mask(r, c)) {
                ++counts[img.pixels(r, c)];
                ++total;
            }
    double h = 0.0;
    for (std::int64_t count : counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

double std_dev(const GrayImage& img, const RoiCandidate& roi) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (int r = roi.min_row; r <= roi.max_row; ++r)
        for (int c = roi.min_col; c <= roi.max_col; ++c)
            if (roi.mask(r, c)) {
                sum += img.pixels(r, c);
                ++n;
            }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (int r = roi.min_row; r <= roi.max_row; ++r)
        for (int c = roi.min_col; c <= roi.max_col; ++c)
            if (roi.mask(r, c)) {
                const double d = img.pixels(r, c) - mean;
                ss += d * d;
            }
    return std::sqrt(ss / static_cast<double>(n));
}

double compactness(const Mask& mask) {
    const ShapeStats s = shape_stats(mask);
    const double ratio = 4.0 * M_PI * static_cast<double>(s.area) / (s.perimeter * s.perimeter);
    return std::clamp(1.0 - ratio, 0.0, std::nextafter(1.0, 0.0));
}

double compactness(const RoiCandidate& roi) { return compactness(roi.mask); }

FeatureVector extract_features(const GrayImage& img, const RoiCandidate& roi,
                               const BreastMask& breast, int ring_width) {
    FeatureVector f;
    f.region_contrast = region_contrast(img, roi, breast, ring_width);
    f.mean_gradient = mean_gradient(img, roi);
    f.entropy = entropy(img, roi);
    f.std_dev = std_dev(img, roi);
    f.compactness = compactness(roi);
    return f;
}

}  // namespace mammo
