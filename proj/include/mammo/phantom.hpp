#pragma once

#include "mammo/core.hpp"
#include "mammo/eval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mammo {

struct Phantom {
    std::string id;
    GrayImage image;
    std::vector<TruthEntry> truths;  // one NORM row, or one CIRC row per blob
};

/// Deterministic 512x512 synthetic mammograms: a left-anchored half-disc
/// breast filled with value-noise texture over a gentle radial base, plus,
/// on every even-indexed phantom, 1-2 Gaussian blobs (sigma 15-40 px, peak
/// 30-80 gray levels above the local base). Truth circles use radius
/// 2*sigma and bottom-left y coordinates.
std::vector<Phantom> make_phantoms(int count, std::uint64_t seed);

}  // namespace mammo
