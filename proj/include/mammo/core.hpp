#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mammo {

/// Dense row-major raster, the substrate of every image-domain operation.
template <typename Scalar>
using ImageArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Raster16 = ImageArray<std::uint16_t>;
using Mask = ImageArray<std::uint8_t>;  // 0 = background, 1 = foreground
using LabelArray = ImageArray<std::int32_t>;

/// Grayscale image with an explicit sample depth. Pixel values are stored in
/// 16-bit cells regardless of depth; an 8-bit image never exceeds 255.
struct GrayImage {
    int bit_depth = 8;  // 8 or 16
    Raster16 pixels;

    int width() const { return static_cast<int>(pixels.cols()); }
    int height() const { return static_cast<int>(pixels.rows()); }
    std::int64_t size() const { return pixels.size(); }

    std::uint16_t max_value() const { return bit_depth == 8 ? 255 : 65535; }
};

bool is_valid(const GrayImage& img);

/// 256-bin intensity histogram with its normalized density.
struct Histogram {
    Eigen::Array<std::int64_t, 256, 1> counts = Eigen::Array<std::int64_t, 256, 1>::Zero();
    Eigen::Array<double, 256, 1> pdf = Eigen::Array<double, 256, 1>::Zero();
    std::int64_t total = 0;
};

using BreastMask = Mask;

// ---------------------------------------------------------------------------
// Error taxonomy. Every module throws a named subclass so callers and tests
// can react to the specific failure.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedFormat : Error { using Error::Error; };
struct CorruptFile : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyImage : Error { using Error::Error; };
struct TooManyLevels : Error { using Error::Error; };
struct InvalidTiling : Error { using Error::Error; };
struct EmptyOverlap : Error { using Error::Error; };
struct InvalidRange : Error { using Error::Error; };
struct EmptyHistogram : Error { using Error::Error; };
struct NotAdjacent : Error { using Error::Error; };
struct TooFewLevels : Error { using Error::Error; };
struct InvalidCut : Error { using Error::Error; };
struct EmptyBackground : Error { using Error::Error; };
struct DegenerateShape : Error { using Error::Error; };
struct SingleClass : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct NoNormals : Error { using Error::Error; };
struct IdMismatch : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

}  // namespace mammo
