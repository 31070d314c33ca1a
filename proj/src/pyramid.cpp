#include "mammo/pyramid.hpp"

namespace mammo {

namespace {

// mirror index into [0, n) without repeating the edge sample
inline int reflect(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
}

// one binomial blur + 2x subsample step, fixed-point arithmetic
Raster16 blur_and_halve(const Raster16& src) {
    const int rows = static_cast<int>(src.rows());
    const int cols = static_cast<int>(src.cols());
    static constexpr int w[5] = {1, 4, 6, 4, 1};

    ImageArray<std::uint32_t> tmp(rows, cols);  // horizontal pass, sums <= 16*65535
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::uint32_t acc = 0;
            for (int k = -2; k <= 2; ++k) acc += w[k + 2] * src(r, reflect(c + k, cols));
            tmp(r, c) = acc;
        }
    }

    const int out_rows = (rows + 1) / 2;
    const int out_cols = (cols + 1) / 2;
    Raster16 out(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r) {
        const int sr = 2 * r;
        for (int c = 0; c < out_cols; ++c) {
            const int sc = 2 * c;
            std::uint32_t acc = 0;
            for (int k = -2; k <= 2; ++k) acc += w[k + 2] * tmp(reflect(sr + k, rows), sc);
            out(r, c) = static_cast<std::uint16_t>((acc + 128) >> 8);  // /256, round half up
        }
    }
    return out;
}

}  // namespace

std::vector<PyramidLevel> gaussian_pyramid(const GrayImage& img, int levels) {
    if (levels < 1) throw Error("gaussian_pyramid: levels must be >= 1");

    // the halving rule fixes every level's dimensions up front
    int w = img.width(), h = img.height();
    for (int k = 1; k < levels; ++k) {
        w = (w + 1) / 2;
        h = (h + 1) / 2;
    }
    if (w < 8 || h < 8)
        throw TooManyLevels("gaussian_pyramid: top level would shrink below 8x8");

    std::vector<PyramidLevel> pyr;
    pyr.reserve(static_cast<std::size_t>(levels));
    pyr.push_back({0, img, 1});
    for (int k = 1; k < levels; ++k) {
        GrayImage next;
        next.bit_depth = pyr.back().image.bit_depth;
        next.pixels = blur_and_halve(pyr.back().image.pixels);
        pyr.push_back({k, std::move(next), 1 << k});
    }
    return pyr;
}

}  // namespace mammo
