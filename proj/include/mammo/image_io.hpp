#pragma once

#include "mammo/core.hpp"

#include <string>

namespace mammo {

/// Reads a grayscale image. The container is sniffed from the file's magic
/// bytes, not the extension. Supported: PGM P2/P5 (maxval <= 65535) and PNG
/// grayscale with 8- or 16-bit samples.
///
/// Throws UnsupportedFormat for color, paletted or otherwise unsupported
/// content and CorruptFile for bad magic or truncated payloads.
GrayImage load_image(const std::string& path);

/// Writes by extension: ".pgm"/".pnm" -> binary P5, ".png" -> grayscale PNG.
/// The sample depth of `img` is preserved, so a save/load round trip is
/// bit-exact.
void save_image(const GrayImage& img, const std::string& path);

void save_pgm(const GrayImage& img, const std::string& path);
void save_png(const GrayImage& img, const std::string& path);

}  // namespace mammo
