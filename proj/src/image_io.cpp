#include "mammo/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace mammo {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    for (auto& ch : tail) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return tail == suffix;
}

// --- PGM ------------------------------------------------------------------

// Reads the next PNM header token, skipping whitespace and '#' comments.
bool next_pnm_token(std::istream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    if (ch == EOF) return false;
    do {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    } while (ch != EOF && !std::isspace(ch) && ch != '#');
    if (ch == '#') in.unget();
    return true;
}

long parse_pnm_number(std::istream& in, const char* what) {
    std::string tok;
    if (!next_pnm_token(in, tok)) throw CorruptFile(std::string("pgm: missing ") + what);
    long v = 0;
    for (char c : tok) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw CorruptFile(std::string("pgm: malformed ") + what);
        v = v * 10 + (c - '0');
        if (v > 1000000000L) throw CorruptFile(std::string("pgm: oversized ") + what);
    }
    return v;
}

GrayImage load_pgm(std::istream& in, bool binary) {
    const long width = parse_pnm_number(in, "width");
    const long height = parse_pnm_number(in, "height");
    const long maxval = parse_pnm_number(in, "maxval");
    if (width < 1 || height < 1) throw CorruptFile("pgm: non-positive dimensions");
    if (maxval < 1 || maxval > 65535) throw UnsupportedFormat("pgm: maxval out of range");

    GrayImage img;
    img.bit_depth = maxval < 256 ? 8 : 16;
    img.pixels.resize(height, width);

    const std::int64_t n = static_cast<std::int64_t>(width) * height;
    if (binary) {
        // exactly one whitespace byte separates the header from the raster
        const int bytes_per = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> buf(static_cast<std::size_t>(n) * bytes_per);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size()))
            throw CorruptFile("pgm: truncated raster");
        std::uint16_t* dst = img.pixels.data();
        if (bytes_per == 1) {
            for (std::int64_t i = 0; i < n; ++i) dst[i] = buf[static_cast<std::size_t>(i)];
        } else {
            for (std::int64_t i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(i) * 2;
                dst[i] = static_cast<std::uint16_t>((buf[k] << 8) | buf[k + 1]);  // big-endian
            }
        }
        for (std::int64_t i = 0; i < n; ++i)
            if (dst[i] > maxval) throw CorruptFile("pgm: sample exceeds maxval");
    } else {
        std::uint16_t* dst = img.pixels.data();
        for (std::int64_t i = 0; i < n; ++i) {
            const long v = parse_pnm_number(in, "sample");
            if (v > maxval) throw CorruptFile("pgm: sample exceeds maxval");
            dst[i] = static_cast<std::uint16_t>(v);
        }
    }
    return img;
}

// --- PNG ------------------------------------------------------------------

struct PngReadCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

GrayImage load_png_file(const std::string& path) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "rb");
    if (!ctx.fp) throw Error("cannot open: " + path);

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw Error("png: allocation failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw Error("png: allocation failed");

    if (setjmp(png_jmpbuf(ctx.png))) throw CorruptFile("png: decode failed: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const png_uint_32 width = png_get_image_width(ctx.png, ctx.info);
    const png_uint_32 height = png_get_image_height(ctx.png, ctx.info);
    const int depth = png_get_bit_depth(ctx.png, ctx.info);
    const int color = png_get_color_type(ctx.png, ctx.info);

    if (color != PNG_COLOR_TYPE_GRAY)
        throw UnsupportedFormat("png: only grayscale is supported");
    if (depth != 8 && depth != 16)
        throw UnsupportedFormat("png: only 8- or 16-bit samples are supported");
    if (width < 1 || height < 1) throw CorruptFile("png: empty image");

    png_set_interlace_handling(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const std::size_t rowbytes = png_get_rowbytes(ctx.png, ctx.info);
    std::vector<unsigned char> raster(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = raster.data() + r * rowbytes;
    png_read_image(ctx.png, rows.data());
    png_read_end(ctx.png, nullptr);

    GrayImage img;
    img.bit_depth = depth;
    img.pixels.resize(height, width);
    std::uint16_t* dst = img.pixels.data();
    if (depth == 8) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i)
            dst[i] = raster[i];
    } else {
        for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i)
            dst[i] = static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
    }
    return img;
}

struct PngWriteCtx {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

}  // namespace

bool is_valid(const GrayImage& img) {
    if (img.bit_depth != 8 && img.bit_depth != 16) return false;
    if (img.width() < 1 || img.height() < 1) return false;
    if (img.bit_depth == 8 && (img.pixels > 255).any()) return false;
    return true;
}

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2) throw CorruptFile("file too short: " + path);

    if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5'))
        return load_pgm(in, magic[1] == '5');
    if (magic[0] == 'P' && magic[1] >= '1' && magic[1] <= '7')
        throw UnsupportedFormat("pnm: only P2/P5 grayscale maps are supported");
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png_file(path);
    }
    throw CorruptFile("unrecognized magic bytes: " + path);
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    const int maxval = img.bit_depth == 8 ? 255 : 65535;
    out << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
    const std::uint16_t* src = img.pixels.data();
    const std::int64_t n = img.size();
    if (img.bit_depth == 8) {
        std::vector<unsigned char> buf(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = static_cast<unsigned char>(src[i]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<unsigned char> buf(static_cast<std::size_t>(n) * 2);
        for (std::int64_t i = 0; i < n; ++i) {
            buf[static_cast<std::size_t>(i) * 2] = static_cast<unsigned char>(src[i] >> 8);
            buf[static_cast<std::size_t>(i) * 2 + 1] = static_cast<unsigned char>(src[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw Error("write failed: " + path);
}

void save_png(const GrayImage& img, const std::string& path) {
    PngWriteCtx ctx;
    ctx.fp = std::fopen(path.c_str(), "wb");
    if (!ctx.fp) throw Error("cannot open for writing: " + path);
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!ctx.png) throw Error("png: allocation failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw Error("png: allocation failed");

    if (setjmp(png_jmpbuf(ctx.png))) throw Error("png: encode failed: " + path);

    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), img.bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    const std::int64_t w = img.width();
    const std::uint16_t* src = img.pixels.data();
    std::vector<unsigned char> row(static_cast<std::size_t>(w) * (img.bit_depth == 8 ? 1 : 2));
    for (int r = 0; r < img.height(); ++r) {
        const std::uint16_t* line = src + static_cast<std::int64_t>(r) * w;
        if (img.bit_depth == 8) {
            for (std::int64_t c = 0; c < w; ++c) row[static_cast<std::size_t>(c)] = static_cast<unsigned char>(line[c]);
        } else {
            for (std::int64_t c = 0; c < w; ++c) {
                row[static_cast<std::size_t>(c) * 2] = static_cast<unsigned char>(line[c] >> 8);
                row[static_cast<std::size_t>(c) * 2 + 1] = static_cast<unsigned char>(line[c] & 0xff);
            }
        }
        png_write_row(ctx.png, row.data());
    }
    png_write_end(ctx.png, nullptr);
}

void save_image(const GrayImage& img, const std::string& path) {
    if (ends_with(path, ".pgm") || ends_with(path, ".pnm")) {
        save_pgm(img, path);
    } else if (ends_with(path, ".png")) {
        save_png(img, path);
    } else {
        throw UnsupportedFormat("unsupported output extension: " + path);
    }
}

}  // namespace mammo
