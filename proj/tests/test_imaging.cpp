#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mammo/image_io.hpp"
#include "mammo/imaging.hpp"
#include "mammo/labeling.hpp"
#include "mammo/rng.hpp"
#include "oracles.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <string>

using namespace mammo;

namespace {

std::string write_temp(const std::string& name, const std::string& bytes) {
    const std::string path = "tmp_" + name;
    std::ofstream os(path, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return path;
}

GrayImage random_image(Rng& rng, int rows, int cols, int bit_depth) {
    GrayImage img;
    img.bit_depth = bit_depth;
    img.pixels.resize(rows, cols);
    const int hi = bit_depth == 8 ? 255 : 65535;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            img.pixels(r, c) = static_cast<std::uint16_t>(rng.uniform_int(0, hi));
    return img;
}

bool same_image(const GrayImage& a, const GrayImage& b) {
    return a.bit_depth == b.bit_depth && a.pixels.rows() == b.pixels.rows() &&
           a.pixels.cols() == b.pixels.cols() && (a.pixels == b.pixels).all();
}

void write_rgb_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    REQUIRE(fp != nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    REQUIRE(setjmp(png_jmpbuf(png)) == 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, 2, 2, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_byte row0[6] = {255, 0, 0, 0, 255, 0};
    png_byte row1[6] = {0, 0, 255, 255, 255, 0};
    png_write_row(png, row0);
    png_write_row(png, row1);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

TEST_CASE("P2 PGM decodes samples in row-major order") {
    const auto path = write_temp("p2.pgm", "P2\n# comment line\n2 2\n255\n0 0 1 1\n");
    const GrayImage img = load_image(path);
    CHECK(img.bit_depth == 8);
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.pixels(0, 0) == 0);
    CHECK(img.pixels(0, 1) == 0);
    CHECK(img.pixels(1, 0) == 1);
    CHECK(img.pixels(1, 1) == 1);
}

TEST_CASE("P5 16-bit samples are big-endian") {
    std::string bytes = "P5\n1 1\n65535\n";
    bytes.push_back(static_cast<char>(0x01));
    bytes.push_back(static_cast<char>(0x02));
    const GrayImage img = load_image(write_temp("p5be.pgm", bytes));
    CHECK(img.bit_depth == 16);
    CHECK(img.pixels(0, 0) == 258);
}

TEST_CASE("maxval selects bit depth") {
    CHECK(load_image(write_temp("mv255.pgm", "P2\n1 1\n255\n7\n")).bit_depth == 8);
    CHECK(load_image(write_temp("mv256.pgm", "P2\n1 1\n256\n7\n")).bit_depth == 16);
    CHECK(load_image(write_temp("mv100.pgm", "P2\n1 1\n100\n7\n")).bit_depth == 8);
}

TEST_CASE("corrupt and unsupported inputs raise typed errors") {
    CHECK_THROWS_AS(load_image(write_temp("trunc.pgm", "P5\n4 4\n255\nab")), CorruptFile);
    CHECK_THROWS_AS(load_image(write_temp("badmagic.img", "XY nothing")), CorruptFile);
    CHECK_THROWS_AS(load_image(write_temp("color.ppm", "P3\n1 1\n255\n1 2 3\n")),
                    UnsupportedFormat);
    CHECK_THROWS_AS(load_image(write_temp("oversample.pgm", "P2\n1 1\n10\n11\n")), CorruptFile);
    const std::string rgb = "tmp_rgb.png";
    write_rgb_png(rgb);
    CHECK_THROWS_AS(load_image(rgb), UnsupportedFormat);
}

TEST_CASE("PGM and PNG round-trips are bit-exact") {
    Rng rng(11);
    for (int depth : {8, 16}) {
        const GrayImage img = random_image(rng, 64, 64, depth);
        save_pgm(img, "tmp_rt.pgm");
        CHECK(same_image(img, load_image("tmp_rt.pgm")));
        save_png(img, "tmp_rt.png");
        CHECK(same_image(img, load_image("tmp_rt.png")));
    }
}

TEST_CASE("16-bit PNG saturation survives the round-trip") {
    GrayImage img;
    img.bit_depth = 16;
    img.pixels = Raster16::Constant(3, 3, 65535);
    save_png(img, "tmp_sat.png");
    const GrayImage back = load_image("tmp_sat.png");
    CHECK(back.bit_depth == 16);
    CHECK((back.pixels == 65535).all());
}

TEST_CASE("standardize leaves 8-bit images alone and min-max maps 16-bit") {
    Rng rng(12);
    const GrayImage img8 = random_image(rng, 8, 8, 8);
    CHECK(same_image(standardize(img8), img8));

    GrayImage img16;
    img16.bit_depth = 16;
    img16.pixels.resize(1, 3);
    img16.pixels << 0, 32768, 65535;
    const GrayImage mapped = standardize(img16);
    CHECK(mapped.bit_depth == 8);
    CHECK(mapped.pixels(0, 0) == 0);
    CHECK(mapped.pixels(0, 2) == 255);

    GrayImage zoom;  // narrow range stretches to the full 8-bit span
    zoom.bit_depth = 16;
    zoom.pixels.resize(1, 3);
    zoom.pixels << 100, 200, 300;
    const GrayImage z = standardize(zoom);
    CHECK(z.pixels(0, 0) == 0);
    CHECK(z.pixels(0, 1) == 128);  // 100*255/200 = 127.5, rounds up
    CHECK(z.pixels(0, 2) == 255);

    GrayImage flat;
    flat.bit_depth = 16;
    flat.pixels = Raster16::Constant(2, 2, 1234);
    CHECK((standardize(flat).pixels == 0).all());
}

TEST_CASE("standardize is idempotent") {
    Rng rng(13);
    const GrayImage img = random_image(rng, 16, 16, 16);
    const GrayImage once = standardize(img);
    CHECK(same_image(standardize(once), once));
}

TEST_CASE("histogram counts, masking, and dimension checks") {
    GrayImage img;
    img.bit_depth = 8;
    img.pixels = Raster16::Constant(4, 4, 7);
    const Histogram h = histogram(img);
    CHECK(h.counts(7) == 16);
    CHECK(h.pdf(7) == doctest::Approx(1.0));

    img.pixels.resize(2, 2);
    img.pixels << 0, 0, 1, 1;
    const Histogram h2 = histogram(img);
    CHECK(h2.pdf(0) == doctest::Approx(0.5));
    CHECK(h2.pdf(1) == doctest::Approx(0.5));

    Mask mask = Mask::Zero(2, 2);
    mask(0, 0) = 1;
    const Histogram hm = histogram(img, &mask);
    CHECK(hm.total == 1);
    CHECK(hm.counts(0) == 1);

    Mask wrong = Mask::Zero(3, 3);
    CHECK_THROWS_AS(histogram(img, &wrong), DimensionMismatch);
}

TEST_CASE("histogram pdf sums to one on random images") {
    Rng rng(14);
    const GrayImage img = random_image(rng, 32, 32, 8);
    std::int64_t tally[256] = {0};
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c) ++tally[img.pixels(r, c)];
    const Histogram h = histogram(img);
    for (int l = 0; l < 256; ++l) CHECK(h.counts(l) == tally[l]);
    CHECK(h.pdf.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("otsu threshold matches the exhaustive oracle") {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayImage img = random_image(rng, 24, 24, 8);
        const Histogram h = histogram(img);
        CHECK(otsu_threshold(h) == oracles::exhaustive_otsu(h));
    }
}

TEST_CASE("otsu splits a bimodal histogram between the modes") {
    Rng rng(16);
    GrayImage img;
    img.bit_depth = 8;
    img.pixels.resize(64, 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) {
            const double v = c < 32 ? 60.0 + rng.normal() * 8.0 : 190.0 + rng.normal() * 8.0;
            img.pixels(r, c) = static_cast<std::uint16_t>(std::clamp(v, 0.0, 255.0));
        }
    const int t = otsu_threshold(histogram(img));
    CHECK(t > 80);
    CHECK(t < 170);
}

TEST_CASE("breast mask keeps only the largest bright component") {
    GrayImage img;
    img.bit_depth = 8;
    img.pixels = Raster16::Zero(64, 64);
    for (int r = 10; r < 40; ++r)
        for (int c = 10; c < 40; ++c) img.pixels(r, c) = 200;  // the breast
    for (int r = 55; r < 60; ++r)
        for (int c = 55; c < 60; ++c) img.pixels(r, c) = 220;  // a film label
    const BreastMask mask = breast_mask(img);
    CHECK(mask(20, 20) == 1);
    CHECK(mask(57, 57) == 0);
    int count = 0;
    oracles::fixpoint_components(mask, &count);
    CHECK(count == 1);
    std::int64_t area = mask.cast<std::int64_t>().sum();
    CHECK(area == 900);
}

TEST_CASE("breast mask of an all-zero image is an error") {
    GrayImage img;
    img.bit_depth = 8;
    img.pixels = Raster16::Zero(8, 8);
    CHECK_THROWS_AS(breast_mask(img), EmptyImage);
}

TEST_CASE("connected components match fixpoint propagation on random masks") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Mask mask(20, 20);
        for (int r = 0; r < 20; ++r)
            for (int c = 0; c < 20; ++c) mask(r, c) = rng.uniform() < 0.4 ? 1 : 0;
        const ComponentLabels got = connected_components(mask);
        int want_count = 0;
        const LabelArray want = oracles::fixpoint_components(mask, &want_count);
        CHECK(got.count == want_count);
        CHECK((got.labels == want).all());
    }
}

TEST_CASE("diagonal touching pixels form one component") {
    Mask mask = Mask::Zero(3, 3);
    mask(0, 0) = 1;
    mask(1, 1) = 1;
    mask(2, 2) = 1;
    CHECK(connected_components(mask).count == 1);
}
