#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mammo/rng.hpp"
#include "mammo/segment.hpp"

#include <cmath>

using namespace mammo;

namespace {

GrayImage image_from(const Raster16& px) {
    GrayImage img;
    img.bit_depth = 8;
    img.pixels = px;
    return img;
}

Mask disc(int rows, int cols, double cr, double cc, double radius) {
    Mask m = Mask::Zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius) m(r, c) = 1;
    return m;
}

std::vector<LabeledRegion> regions_of(const Mask& m) { return label_components(m); }

std::int64_t total_area(const std::vector<LabeledRegion>& rs) {
    std::int64_t a = 0;
    for (const auto& r : rs) a += r.area;
    return a;
}

}  // namespace

TEST_CASE("threshold layers keep strictly brighter pixels") {
    Raster16 px(1, 3);
    px << 4, 5, 6;
    const auto layers = threshold_layers(image_from(px), {5});
    REQUIRE(layers.size() == 1);
    CHECK(layers[0](0, 0) == 0);
    CHECK(layers[0](0, 1) == 0);  // the threshold itself stays out
    CHECK(layers[0](0, 2) == 1);
}

TEST_CASE("ascending thresholds produce nested layers") {
    Rng rng(7);
    Raster16 px(24, 24);
    for (int r = 0; r < 24; ++r)
        for (int c = 0; c < 24; ++c) px(r, c) = static_cast<std::uint16_t>(rng.below(256));
    const auto layers = threshold_layers(image_from(px), {50, 100, 150});
    REQUIRE(layers.size() == 3);
    for (std::size_t k = 1; k < layers.size(); ++k)
        for (int r = 0; r < 24; ++r)
            for (int c = 0; c < 24; ++c)
                if (layers[k](r, c)) REQUIRE(layers[k - 1](r, c));
}

TEST_CASE("components get raster-order labels with exact stats") {
    Mask m = Mask::Zero(10, 12);
    m.block(1, 1, 3, 3).setConstant(1);
    m.block(5, 7, 3, 3).setConstant(1);
    const auto regions = regions_of(m);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].label == 1);
    CHECK(regions[0].area == 9);
    CHECK(regions[0].min_row == 1);
    CHECK(regions[0].max_row == 3);
    CHECK(regions[0].min_col == 1);
    CHECK(regions[0].max_col == 3);
    CHECK(regions[0].pixel_set.size() == 9);
    CHECK(regions[1].label == 2);
    CHECK(regions[1].area == 9);
    CHECK(regions[1].min_row == 5);
    CHECK(regions[1].max_col == 9);
    CHECK(regions[1].prestige == 1);
}

TEST_CASE("diagonal contact joins into one region") {
    Mask m = Mask::Zero(6, 6);
    m(1, 1) = 1;
    m(2, 2) = 1;
    m(3, 3) = 1;
    const auto regions = regions_of(m);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].area == 3);
}

TEST_CASE("an empty layer has no regions") {
    CHECK(regions_of(Mask::Zero(8, 8)).empty());
}

TEST_CASE("concentric discs stack prestige onto the outermost band") {
    const int n = 32;
    const Mask outer = disc(n, n, 15.5, 15.5, 11.0);
    const Mask mid = disc(n, n, 15.5, 15.5, 6.5);
    const Mask inner = disc(n, n, 15.5, 15.5, 3.0);
    // densest band first
    const std::vector<std::vector<LabeledRegion>> levels = {regions_of(inner), regions_of(mid),
                                                            regions_of(outer)};
    const auto retained = accumulate_prestige(levels, n, n, 0.8, 3);
    REQUIRE(retained.size() == 1);
    CHECK(retained[0].prestige == 3);
    CHECK(retained[0].area == total_area(regions_of(outer)));
}

TEST_CASE("an isolated blob without nesting support is discarded") {
    const int n = 32;
    const std::vector<std::vector<LabeledRegion>> levels = {
        regions_of(disc(n, n, 8.0, 8.0, 3.0)),    // densest, sits apart
        regions_of(disc(n, n, 24.0, 24.0, 5.0)),  // does not cover it
        regions_of(disc(n, n, 24.0, 24.0, 7.0))};
    const auto retained = accumulate_prestige(levels, n, n, 0.8, 3);
    CHECK(retained.empty());  // no chain reaches prestige 3
    const auto relaxed = accumulate_prestige(levels, n, n, 0.8, 2);
    REQUIRE(relaxed.size() == 1);  // outer 24-centered disc got the mid blob
    CHECK(relaxed[0].prestige == 2);
}

TEST_CASE("two dense cores lift a shared envelope to prestige three") {
    const int n = 40;
    Mask cores = disc(n, n, 12.0, 12.0, 3.0);
    const Mask core2 = disc(n, n, 12.0, 28.0, 3.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (core2(r, c)) cores(r, c) = 1;
    Mask envelope = Mask::Zero(n, n);
    envelope.block(6, 6, 14, 30).setConstant(1);
    const std::vector<std::vector<LabeledRegion>> levels = {regions_of(cores),
                                                            regions_of(envelope)};
    const auto retained = accumulate_prestige(levels, n, n, 0.8, 3);
    REQUIRE(retained.size() == 1);
    CHECK(retained[0].prestige == 3);
    CHECK(retained[0].area == 14 * 30);
}

TEST_CASE("partial coverage below the fraction forwards nothing") {
    // child bar cols 0..9; two parent bars cover 4/10 each
    const int n = 12;
    Mask child = Mask::Zero(n, n);
    child.block(5, 0, 1, 10).setConstant(1);
    Mask parents = Mask::Zero(n, n);
    parents.block(4, 0, 3, 4).setConstant(1);
    parents.block(4, 6, 3, 4).setConstant(1);
    const std::vector<std::vector<LabeledRegion>> levels = {regions_of(child),
                                                            regions_of(parents)};
    const auto retained = accumulate_prestige(levels, n, n, 0.8, 2);
    CHECK(retained.empty());
}

TEST_CASE("coverage exactly at the fraction forwards") {
    const int n = 12;
    Mask child = Mask::Zero(n, n);
    child.block(5, 0, 1, 10).setConstant(1);
    Mask parent = Mask::Zero(n, n);
    parent.block(4, 0, 3, 8).setConstant(1);  // covers 8/10 = 0.8
    const std::vector<std::vector<LabeledRegion>> levels = {regions_of(child),
                                                            regions_of(parent)};
    const auto retained = accumulate_prestige(levels, n, n, 0.8, 2);
    REQUIRE(retained.size() == 1);
    CHECK(retained[0].prestige == 2);
}

TEST_CASE("centroid-distance rule forwards only to nearby parents") {
    const int n = 32;
    const Mask parent = disc(n, n, 15.0, 15.0, 10.0);
    Mask near_child = Mask::Zero(n, n);
    near_child.block(14, 14, 2, 2).setConstant(1);
    Mask far_child = Mask::Zero(n, n);
    far_child.block(14, 27, 2, 2).setConstant(1);

    const std::vector<std::vector<LabeledRegion>> near_levels = {regions_of(near_child),
                                                                 regions_of(parent)};
    const auto kept = accumulate_prestige(near_levels, n, n, 0.8, 2,
                                          MergeRule::CentroidDistance, 0.2);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].prestige == 2);

    const std::vector<std::vector<LabeledRegion>> far_levels = {regions_of(far_child),
                                                                regions_of(parent)};
    CHECK(accumulate_prestige(far_levels, n, n, 0.8, 2, MergeRule::CentroidDistance, 0.2).empty());
}

TEST_CASE("retained regions list the least dense level first") {
    const int n = 24;
    const Mask outer = disc(n, n, 11.5, 11.5, 9.0);
    const Mask mid = disc(n, n, 11.5, 11.5, 5.5);
    const Mask inner = disc(n, n, 11.5, 11.5, 2.5);
    auto lv_inner = regions_of(inner);
    auto lv_mid = regions_of(mid);
    auto lv_outer = regions_of(outer);
    lv_inner[0].level_index = 3;
    lv_mid[0].level_index = 2;
    lv_outer[0].level_index = 1;
    const auto retained =
        accumulate_prestige({lv_inner, lv_mid, lv_outer}, n, n, 0.8, 2);
    REQUIRE(retained.size() == 2);  // outer reaches 3, mid reaches 2
    CHECK(retained[0].level_index == 1);
    CHECK(retained[0].prestige == 3);
    CHECK(retained[1].level_index == 2);
    CHECK(retained[1].prestige == 2);
}

TEST_CASE("upsample at depth zero is the identity") {
    Mask m = Mask::Zero(9, 9);
    m.block(2, 3, 2, 4).setConstant(1);
    auto regions = regions_of(m);
    REQUIRE(regions.size() == 1);
    regions[0].prestige = 5;
    regions[0].level_index = 2;
    const RoiCandidate roi = upsample_roi(regions[0], 0, 9, 9);
    CHECK(roi.mask.rows() == 9);
    CHECK((roi.mask == m).all());
    CHECK(roi.min_row == 2);
    CHECK(roi.max_row == 3);
    CHECK(roi.min_col == 3);
    CHECK(roi.max_col == 6);
    CHECK(roi.centroid_row == doctest::Approx(2.5));
    CHECK(roi.centroid_col == doctest::Approx(4.5));
    CHECK(roi.prestige == 5);
    CHECK(roi.level_index == 2);
}

TEST_CASE("one working pixel becomes a full block at depth two") {
    LabeledRegion r;
    r.pixel_set = {{3, 5}};
    r.area = 1;
    const RoiCandidate roi = upsample_roi(r, 2, 64, 64);
    CHECK(roi.min_row == 12);
    CHECK(roi.max_row == 15);
    CHECK(roi.min_col == 20);
    CHECK(roi.max_col == 23);
    CHECK(roi.mask.cast<int>().sum() == 16);
    CHECK(roi.centroid_row == doctest::Approx(13.5));
    CHECK(roi.centroid_col == doctest::Approx(21.5));
}

TEST_CASE("upsampled blocks clip at the image edge") {
    LabeledRegion r;
    r.pixel_set = {{3, 3}};
    r.area = 1;
    const RoiCandidate roi = upsample_roi(r, 2, 14, 14);
    CHECK(roi.min_row == 12);
    CHECK(roi.max_row == 13);
    CHECK(roi.min_col == 12);
    CHECK(roi.max_col == 13);
    CHECK(roi.mask.cast<int>().sum() == 4);
    CHECK(roi.centroid_row == doctest::Approx(12.5));
}

TEST_CASE("interior regions scale area by the square of the block size") {
    Rng rng(9);
    Mask m = Mask::Zero(16, 16);
    for (int k = 0; k < 30; ++k)
        m(1 + static_cast<int>(rng.below(14)), 1 + static_cast<int>(rng.below(14))) = 1;
    for (auto& region : regions_of(m)) {
        const RoiCandidate roi = upsample_roi(region, 1, 32, 32);
        CHECK(roi.mask.cast<std::int64_t>().sum() == region.area * 4);
    }
}
