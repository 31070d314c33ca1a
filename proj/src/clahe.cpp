#include "mammo/clahe.hpp"

#include <cmath>
#include <vector>

namespace mammo {

std::array<std::uint8_t, 256> equalize_lut(const Eigen::Array<std::int64_t, 256, 1>& counts,
                                           double clip_limit) {
    Eigen::Array<std::int64_t, 256, 1> h = counts;
    const std::int64_t n = h.sum();

    std::array<std::uint8_t, 256> lut{};
    if (n == 0) {
        for (int v = 0; v < 256; ++v) lut[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(v);
        return lut;
    }

    // clip relative to the uniform bin height, redistribute excess uniformly
    const std::int64_t limit =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(clip_limit * static_cast<double>(n) / 256.0));
    std::int64_t excess = 0;
    for (int v = 0; v < 256; ++v) {
        if (h[v] > limit) {
            excess += h[v] - limit;
            h[v] = limit;
        }
    }
    const std::int64_t per_bin = excess / 256;
    const std::int64_t remainder = excess % 256;
    for (int v = 0; v < 256; ++v) h[v] += per_bin + (v < remainder ? 1 : 0);

    // equalize: stretch the cdf so the first occupied bin maps to 0
    std::int64_t cdf_min = 0;
    for (int v = 0; v < 256; ++v) {
        if (h[v] > 0) {
            cdf_min = h[v];
            break;
        }
    }
    const std::int64_t denom = n - cdf_min;
    if (denom <= 0) {
        // all mass in one bin: the CDF jumps straight to 1 there, so that
        // bin and everything above map to the top of the range
        int first = 0;
        while (first < 256 && h[first] == 0) ++first;
        for (int v = 0; v < 256; ++v)
            lut[static_cast<std::size_t>(v)] = v >= first ? 255 : 0;
        return lut;
    }
    std::int64_t cdf = 0;
    for (int v = 0; v < 256; ++v) {
        cdf += h[v];
        const std::int64_t x = std::max<std::int64_t>(0, cdf - cdf_min);
        const std::int64_t mapped = (510 * x + denom) / (2 * denom);  // round(255*x/denom)
        lut[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(std::min<std::int64_t>(255, mapped));
    }
    return lut;
}

GrayImage clahe(const GrayImage& img, double clip_limit, int tiles_x, int tiles_y) {
    if (img.bit_depth != 8) throw Error("clahe: image must be 8-bit");
    if (clip_limit <= 0.0) throw Error("clahe: clip limit must be positive");
    if (tiles_x < 1 || tiles_y < 1) throw InvalidTiling("clahe: tile grid must be at least 1x1");
    const int rows = img.height(), cols = img.width();
    if (cols < 2 * tiles_x || rows < 2 * tiles_y)
        throw InvalidTiling("clahe: tiles would be smaller than 2x2");

    // balanced tile partition
    std::vector<int> xe(static_cast<std::size_t>(tiles_x) + 1), ye(static_cast<std::size_t>(tiles_y) + 1);
    for (int i = 0; i <= tiles_x; ++i)
        xe[static_cast<std::size_t>(i)] = static_cast<int>((static_cast<std::int64_t>(i) * cols) / tiles_x);
    for (int i = 0; i <= tiles_y; ++i)
        ye[static_cast<std::size_t>(i)] = static_cast<int>((static_cast<std::int64_t>(i) * rows) / tiles_y);

    std::vector<std::array<std::uint8_t, 256>> luts(static_cast<std::size_t>(tiles_x) * tiles_y);
    std::vector<double> cx(static_cast<std::size_t>(tiles_x)), cy(static_cast<std::size_t>(tiles_y));
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            Eigen::Array<std::int64_t, 256, 1> counts = Eigen::Array<std::int64_t, 256, 1>::Zero();
            for (int r = ye[static_cast<std::size_t>(ty)]; r < ye[static_cast<std::size_t>(ty) + 1]; ++r)
                for (int c = xe[static_cast<std::size_t>(tx)]; c < xe[static_cast<std::size_t>(tx) + 1]; ++c)
                    ++counts[img.pixels(r, c)];
            luts[static_cast<std::size_t>(ty) * tiles_x + tx] = equalize_lut(counts, clip_limit);
        }
    }
    for (int tx = 0; tx < tiles_x; ++tx)
        cx[static_cast<std::size_t>(tx)] =
            0.5 * (xe[static_cast<std::size_t>(tx)] + xe[static_cast<std::size_t>(tx) + 1] - 1);
    for (int ty = 0; ty < tiles_y; ++ty)
        cy[static_cast<std::size_t>(ty)] =
            0.5 * (ye[static_cast<std::size_t>(ty)] + ye[static_cast<std::size_t>(ty) + 1] - 1);

    // locate the bracketing tile centers and the interpolation weight
    auto bracket = [](const std::vector<double>& centers, int pos, int& i0, int& i1, double& w) {
        const int nt = static_cast<int>(centers.size());
        if (pos <= centers[0]) {
            i0 = i1 = 0;
            w = 0.0;
            return;
        }
        if (pos >= centers[static_cast<std::size_t>(nt) - 1]) {
            i0 = i1 = nt - 1;
            w = 0.0;
            return;
        }
        int i = 0;
        while (pos >= centers[static_cast<std::size_t>(i) + 1]) ++i;
        i0 = i;
        i1 = i + 1;
        w = (pos - centers[static_cast<std::size_t>(i0)]) /
            (centers[static_cast<std::size_t>(i1)] - centers[static_cast<std::size_t>(i0)]);
    };

    GrayImage out;
    out.bit_depth = 8;
    out.pixels.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
        int ty0, ty1;
        double wy;
        bracket(cy, r, ty0, ty1, wy);
        for (int c = 0; c < cols; ++c) {
            int tx0, tx1;
            double wx;
            bracket(cx, c, tx0, tx1, wx);
            const std::uint16_t v = img.pixels(r, c);
            const double v00 = luts[static_cast<std::size_t>(ty0) * tiles_x + tx0][v];
            const double v01 = luts[static_cast<std::size_t>(ty0) * tiles_x + tx1][v];
            const double v10 = luts[static_cast<std::size_t>(ty1) * tiles_x + tx0][v];
            const double v11 = luts[static_cast<std::size_t>(ty1) * tiles_x + tx1][v];
            const double top = v00 + wx * (v01 - v00);
            const double bot = v10 + wx * (v11 - v10);
            out.pixels(r, c) = static_cast<std::uint16_t>(std::floor(top + wy * (bot - top) + 0.5));
        }
    }
    return out;
}

}  // namespace mammo
