#include "mammo/phantom.hpp"

#include "mammo/rng.hpp"

#include <cmath>
#include <cstdio>

namespace mammo {

namespace {

constexpr int kSize = 512;
constexpr double kBreastRadius = 470.0;
constexpr double kCenterRow = 255.5;  // half-disc anchored on the left edge

/// Bilinear lattice noise: one octave with grid spacing `step`.
Eigen::ArrayXXd value_noise_octave(Rng& rng, int rows, int cols, int step) {
    const int gr = rows / step + 2, gc = cols / step + 2;
    Eigen::ArrayXXd lattice(gr, gc);
    for (int r = 0; r < gr; ++r)
        for (int c = 0; c < gc; ++c) lattice(r, c) = rng.uniform() * 2.0 - 1.0;
    Eigen::ArrayXXd out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const int r0 = r / step;
        const double fr = static_cast<double>(r % step) / step;
        for (int c = 0; c < cols; ++c) {
            const int c0 = c / step;
            const double fc = static_cast<double>(c % step) / step;
            const double top = lattice(r0, c0) * (1.0 - fc) + lattice(r0, c0 + 1) * fc;
            const double bot = lattice(r0 + 1, c0) * (1.0 - fc) + lattice(r0 + 1, c0 + 1) * fc;
            out(r, c) = top * (1.0 - fr) + bot * fr;
        }
    }
    return out;
}

}  // namespace

std::vector<Phantom> make_phantoms(int count, std::uint64_t seed) {
    std::vector<Phantom> phantoms;
    phantoms.reserve(static_cast<std::size_t>(count));
    for (int idx = 0; idx < count; ++idx) {
        // Independent stream per phantom so a subset regenerates identically.
        Rng rng(seed + static_cast<std::uint64_t>(idx) * 0x9e3779b97f4a7c15ull);
        Phantom ph;
        char name[16];
        std::snprintf(name, sizeof(name), "ph%03d", idx);
        ph.id = name;

        Eigen::ArrayXXd field(kSize, kSize);
        for (int r = 0; r < kSize; ++r) {
            for (int c = 0; c < kSize; ++c) {
                const double d = std::hypot(r - kCenterRow, static_cast<double>(c));
                field(r, c) = d <= kBreastRadius
                                  ? 100.0 + 40.0 * (1.0 - d / kBreastRadius)
                                  : 0.0;
            }
        }
        Eigen::ArrayXXd noise = value_noise_octave(rng, kSize, kSize, 64) * 8.0 +
                                value_noise_octave(rng, kSize, kSize, 32) * 5.0 +
                                value_noise_octave(rng, kSize, kSize, 16) * 3.0 +
                                value_noise_octave(rng, kSize, kSize, 8) * 1.5;

        const bool abnormal = idx % 2 == 0;
        if (abnormal) {
            const int blobs = rng.uniform_int(1, 2);
            std::vector<std::pair<double, double>> centers;
            for (int bi = 0; bi < blobs; ++bi) {
                const double sigma = rng.uniform() * 25.0 + 15.0;
                const double peak = rng.uniform() * 50.0 + 30.0;
                double br = 0.0, bc = 0.0;
                for (int attempt = 0; attempt < 64; ++attempt) {
                    const double ang = (rng.uniform() * 2.0 - 1.0) * 1.1;  // radians off axis
                    const double rad = (0.25 + 0.55 * rng.uniform()) * kBreastRadius;
                    br = kCenterRow + rad * std::sin(ang);
                    bc = rad * std::cos(ang);
                    const bool inside = std::hypot(br - kCenterRow, bc) + 2.5 * sigma <
                                            kBreastRadius &&
                                        br > 2.5 * sigma && br < kSize - 2.5 * sigma &&
                                        bc < kSize - 2.5 * sigma;
                    bool clear = inside;
                    for (const auto& [or_, oc] : centers)
                        if (std::hypot(br - or_, bc - oc) < 5.0 * sigma) clear = false;
                    if (clear) break;
                }
                centers.emplace_back(br, bc);
                for (int r = 0; r < kSize; ++r)
                    for (int c = 0; c < kSize; ++c) {
                        const double d2 = (r - br) * (r - br) + (c - bc) * (c - bc);
                        field(r, c) += peak * std::exp(-d2 / (2.0 * sigma * sigma));
                    }
                TruthEntry t;
                t.id = ph.id;
                t.tissue = "F";
                t.cls = "CIRC";
                t.severity = "M";
                t.x = bc;
                t.y = kSize - 1 - br;  // bottom-left convention
                t.radius = 2.0 * sigma;
                t.has_circle = true;
                ph.truths.push_back(t);
            }
        } else {
            TruthEntry t;
            t.id = ph.id;
            t.tissue = "F";
            t.cls = "NORM";
            t.is_normal = true;
            ph.truths.push_back(t);
        }

        ph.image.bit_depth = 8;
        ph.image.pixels = Raster16::Zero(kSize, kSize);
        for (int r = 0; r < kSize; ++r) {
            for (int c = 0; c < kSize; ++c) {
                const double d = std::hypot(r - kCenterRow, static_cast<double>(c));
                if (d > kBreastRadius) continue;
                const double v = field(r, c) + noise(r, c);
                ph.image.pixels(r, c) =
                    static_cast<std::uint16_t>(std::clamp(std::lround(v), 1l, 255l));
            }
        }
        phantoms.push_back(std::move(ph));
    }
    return phantoms;
}

}  // namespace mammo
