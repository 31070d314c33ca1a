#include "mammo/imaging.hpp"

#include "mammo/labeling.hpp"

#include <cmath>

namespace mammo {

GrayImage standardize(const GrayImage& img) {
    if (img.bit_depth == 8) return img;

    const std::uint16_t lo = img.pixels.minCoeff();
    const std::uint16_t hi = img.pixels.maxCoeff();

    GrayImage out;
    out.bit_depth = 8;
    if (hi == lo) {
        out.pixels = Raster16::Zero(img.pixels.rows(), img.pixels.cols());
        return out;
    }
    // Divide per pixel: a pre-divided scale factor perturbs exact .5
    // quotients (100 * (255/200) lands below 127.5) and breaks half-up.
    const double range = static_cast<double>(hi - lo);
    out.pixels = ((img.pixels.cast<double>() - static_cast<double>(lo)) * 255.0 / range + 0.5)
                     .floor()
                     .cast<std::uint16_t>();
    return out;
}

Histogram histogram(const GrayImage& img, const Mask* mask) {
    if (img.bit_depth != 8) throw Error("histogram: image must be 8-bit");
    if (mask && (mask->rows() != img.pixels.rows() || mask->cols() != img.pixels.cols()))
        throw DimensionMismatch("histogram: mask dimensions differ from image");

    Histogram h;
    const std::uint16_t* px = img.pixels.data();
    const std::int64_t n = img.size();
    if (mask) {
        const std::uint8_t* m = mask->data();
        for (std::int64_t i = 0; i < n; ++i)
            if (m[i]) ++h.counts[px[i]];
    } else {
        for (std::int64_t i = 0; i < n; ++i) ++h.counts[px[i]];
    }
    h.total = h.counts.sum();
    if (h.total > 0) h.pdf = h.counts.cast<double>() / static_cast<double>(h.total);
    return h;
}

int otsu_threshold(const Histogram& h) {
    const double total = static_cast<double>(h.total);
    if (total <= 0) return 0;

    double sum_all = 0.0;
    for (int l = 0; l < 256; ++l) sum_all += l * static_cast<double>(h.counts[l]);

    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += static_cast<double>(h.counts[t]);
        sum0 += t * static_cast<double>(h.counts[t]);
        const double w1 = total - w0;
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var_between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var_between > best) {
            best = var_between;
            best_t = t;
        }
    }
    return best_t;
}

BreastMask breast_mask(const GrayImage& img) {
    if (img.bit_depth != 8) throw Error("breast_mask: image must be 8-bit");
    if ((img.pixels != 0).count() == 0) throw EmptyImage("breast_mask: image is all zero");

    const Histogram h = histogram(img);
    const int t = otsu_threshold(h);
    Mask fg = (img.pixels > static_cast<std::uint16_t>(t)).cast<std::uint8_t>();

    const ComponentLabels cc = connected_components(fg);
    // keep the largest component only
    std::vector<std::int64_t> area(static_cast<std::size_t>(cc.count) + 1, 0);
    const std::int32_t* lbl = cc.labels.data();
    for (std::int64_t i = 0; i < cc.labels.size(); ++i) ++area[static_cast<std::size_t>(lbl[i])];
    int keep = 1;
    for (int k = 2; k <= cc.count; ++k)
        if (area[static_cast<std::size_t>(k)] > area[static_cast<std::size_t>(keep)]) keep = k;

    return (cc.labels == keep).cast<std::uint8_t>();
}

}  // namespace mammo
