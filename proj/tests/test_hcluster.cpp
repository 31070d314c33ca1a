#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mammo/hcluster.hpp"
#include "mammo/rng.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace mammo;

namespace {

Histogram hist_from(std::initializer_list<std::pair<int, double>> masses) {
    Histogram h;
    for (const auto& [level, mass] : masses) h.counts(level) = std::llround(mass * 1000000);
    h.total = h.counts.sum();
    for (int l = 0; l < 256; ++l)
        h.pdf(l) = static_cast<double>(h.counts(l)) / static_cast<double>(h.total);
    return h;
}

CooccurrenceMatrix zero_cm() {
    CooccurrenceMatrix cm;
    cm.entries.setZero();
    cm.pair_count = 1;
    return cm;
}

Histogram random_hist(Rng& rng) {
    Histogram h;
    const int occupied = rng.uniform_int(12, 40);
    for (int k = 0; k < occupied; ++k)
        h.counts(rng.uniform_int(0, 255)) += rng.uniform_int(1, 500);
    h.total = h.counts.sum();
    for (int l = 0; l < 256; ++l)
        h.pdf(l) = static_cast<double>(h.counts(l)) / static_cast<double>(h.total);
    return h;
}

}  // namespace

TEST_CASE("initial clusters are singletons over occupied levels") {
    const Histogram h = hist_from({{10, 0.3}, {200, 0.7}});
    const auto clusters = init_clusters(h);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].lo == 10);
    CHECK(clusters[0].hi == 10);
    CHECK(clusters[1].lo == 200);
    CHECK(clusters[1].hi == 200);
    CHECK(clusters[0].mass == doctest::Approx(0.3));
    CHECK(clusters[1].mass == doctest::Approx(0.7));

    const Histogram h3 = hist_from({{3, 0.2}, {4, 0.3}, {5, 0.5}});
    const auto c3 = init_clusters(h3);
    REQUIRE(c3.size() == 3);
    CHECK(c3[0].mean == doctest::Approx(3.0));
    CHECK(c3[2].mean == doctest::Approx(5.0));

    Histogram empty;
    CHECK_THROWS_AS(init_clusters(empty), EmptyHistogram);
}

TEST_CASE("a uniform histogram yields 256 singletons") {
    Histogram h;
    h.counts.setConstant(4);
    h.total = h.counts.sum();
    h.pdf.setConstant(1.0 / 256);
    CHECK(init_clusters(h).size() == 256);
}

TEST_CASE("merge distance follows the dissimilarity formula") {
    // masses .4/.6 at 10/20: combined mean 16, union variance 24, zero
    // coupling: dist = (.4-.6)^2 * (10-20)^2 / 24 = 1/6
    const Histogram h = hist_from({{10, 0.4}, {20, 0.6}});
    const auto c = init_clusters(h);
    const double d = merge_distance(c[0], c[1], h, zero_cm(), ClusterWeighting::MassDifference);
    CHECK(d == doctest::Approx(1.0 / 6).epsilon(1e-9));
}

TEST_CASE("equal-mass clusters are distance zero under the printed weighting") {
    const Histogram h = hist_from({{10, 0.5}, {20, 0.5}});
    const auto c = init_clusters(h);
    CHECK(merge_distance(c[0], c[1], h, zero_cm(), ClusterWeighting::MassDifference) == 0.0);
    // the mass-product switch sees the separation instead
    CHECK(merge_distance(c[0], c[1], h, zero_cm(), ClusterWeighting::MassProduct) > 0.0);
}

TEST_CASE("full co-occurrence coupling zeroes the distance") {
    const Histogram h = hist_from({{10, 0.4}, {20, 0.6}});
    const auto c = init_clusters(h);
    CooccurrenceMatrix cm = zero_cm();
    cm.entries(10, 20) = 1.0;  // CP = 1 for ranges {10} x {20}
    CHECK(merge_distance(c[0], c[1], h, cm, ClusterWeighting::MassDifference) == 0.0);
}

TEST_CASE("vanishing union variance collapses the distance to zero") {
    // all histogram mass lies outside the union range, so the variance term
    // vanishes and the pair scores as an immediate merge
    const Histogram h = hist_from({{5, 1.0}});
    const ClusterStats a{100, 100, 0.5, 100.0};
    const ClusterStats b{101, 101, 0.5, 101.0};
    CHECK(merge_distance(a, b, h, zero_cm(), ClusterWeighting::MassProduct) == 0.0);
}

TEST_CASE("non-adjacent clusters cannot be scored") {
    const Histogram h = hist_from({{10, 0.3}, {20, 0.3}, {30, 0.4}});
    const auto c = init_clusters(h);
    CHECK_THROWS_AS(merge_distance(c[0], c[2], h, zero_cm(), ClusterWeighting::MassDifference),
                    NotAdjacent);
    CHECK_THROWS_AS(merge_distance(c[1], c[0], h, zero_cm(), ClusterWeighting::MassDifference),
                    NotAdjacent);
}

TEST_CASE("agglomerate merges down to m clusters, adjacent pairs only") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const Histogram h = random_hist(rng);
        const auto initial = init_clusters(h);
        const int m = 2 + static_cast<int>(rng.below(4));
        if (static_cast<int>(initial.size()) < m) continue;
        const Dendrogram d = agglomerate(initial, h, zero_cm(), m, ClusterWeighting::MassDifference);
        CHECK(d.merges.size() == initial.size() - static_cast<std::size_t>(m));
        CHECK(d.final_clusters.size() == static_cast<std::size_t>(m));
        double mass = 0.0;
        for (std::size_t i = 0; i < d.final_clusters.size(); ++i) {
            const ClusterStats& c = d.final_clusters[i];
            mass += c.mass;
            if (i > 0) CHECK(d.final_clusters[i - 1].hi < c.lo);
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        for (const MergeRecord& rec : d.merges) CHECK(rec.left.hi < rec.right.lo);
    }
}

TEST_CASE("merged stats equal the weighted rollup of the children") {
    // equal masses at 10 and 30 give an exactly zero pair distance, so that
    // merge happens first
    const Histogram h = hist_from({{10, 0.45}, {30, 0.45}, {200, 0.1}});
    const Dendrogram d =
        agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassDifference);
    REQUIRE(d.merges.size() == 1);
    REQUIRE(d.final_clusters.size() == 2);
    const ClusterStats& merged = d.final_clusters[0];
    CHECK(merged.lo == 10);
    CHECK(merged.hi == 30);
    CHECK(merged.mass == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(merged.mean == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("three spikes merge the closer pair first under both weightings") {
    const Histogram h = hist_from({{10, 0.3}, {20, 0.3}, {240, 0.4}});
    for (const auto weighting : {ClusterWeighting::MassDifference, ClusterWeighting::MassProduct}) {
        const Dendrogram d = agglomerate(init_clusters(h), h, zero_cm(), 2, weighting);
        REQUIRE(d.merges.size() == 1);
        CHECK(d.merges[0].left.lo == 10);
        CHECK(d.merges[0].right.hi == 20);
    }
}

TEST_CASE("exact distance ties resolve to the lowest gray pair") {
    // equal masses make every pair distance exactly zero under the
    // mass-difference weighting
    const Histogram h = hist_from({{10, 0.25}, {20, 0.25}, {240, 0.25}, {250, 0.25}});
    const Dendrogram d =
        agglomerate(init_clusters(h), h, zero_cm(), 3, ClusterWeighting::MassDifference);
    REQUIRE(d.merges.size() == 1);
    CHECK(d.merges[0].left.lo == 10);
    CHECK(d.merges[0].right.hi == 20);
}

TEST_CASE("too few occupied levels cannot reach the requested cluster count") {
    const Histogram h = hist_from({{10, 0.5}, {20, 0.5}});
    CHECK_THROWS_AS(agglomerate(init_clusters(h), h, zero_cm(), 3, ClusterWeighting::MassDifference),
                    TooFewLevels);
}

TEST_CASE("cut returns the hi bounds of the first m-1 clusters") {
    const Histogram h = hist_from({{0, 0.25}, {100, 0.25}, {101, 0.25}, {255, 0.25}});
    const Dendrogram d =
        agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassDifference);
    const ThresholdSet t = cut(d, 2);
    REQUIRE(t.size() == 1);
    CHECK(t[0] == d.final_clusters[0].hi);
    CHECK(t[0] == 100);
}

TEST_CASE("cut cardinality and ordering over random histograms") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const Histogram h = random_hist(rng);
        const auto initial = init_clusters(h);
        if (initial.size() < 2) continue;
        const Dendrogram d = agglomerate(initial, h, zero_cm(), 2, ClusterWeighting::MassDifference);
        for (int m = 2; m <= 8; ++m) {
            if (static_cast<int>(initial.size()) < m) continue;
            const ThresholdSet t = cut(d, m);
            REQUIRE(t.size() == static_cast<std::size_t>(m - 1));
            for (std::size_t i = 1; i < t.size(); ++i) REQUIRE(t[i - 1] < t[i]);
        }
    }
}

TEST_CASE("cutting one level shallower removes exactly one boundary") {
    Rng rng(43);
    const Histogram h = random_hist(rng);
    const auto initial = init_clusters(h);
    REQUIRE(initial.size() >= 6);
    const Dendrogram d = agglomerate(initial, h, zero_cm(), 2, ClusterWeighting::MassDifference);
    for (int m = 3; m <= 6; ++m) {
        const ThresholdSet deep = cut(d, m);
        const ThresholdSet shallow = cut(d, m - 1);
        std::vector<int> removed;
        for (int t : deep)
            if (std::find(shallow.begin(), shallow.end(), t) == shallow.end()) removed.push_back(t);
        CHECK(removed.size() == 1);
        CHECK(shallow.size() + 1 == deep.size());
    }
}

TEST_CASE("invalid cuts are rejected") {
    // three occupied levels agglomerated to two: valid cuts are m = 2 and 3
    const Histogram h = hist_from({{10, 0.5}, {20, 0.3}, {30, 0.2}});
    const Dendrogram d =
        agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassDifference);
    CHECK_NOTHROW(cut(d, 2));
    CHECK_NOTHROW(cut(d, 3));
    CHECK_THROWS_AS(cut(d, 4), InvalidCut);
    CHECK_THROWS_AS(cut(d, 1), InvalidCut);
    CHECK_THROWS_AS(cut(d, 0), InvalidCut);
}

TEST_CASE("identical inputs replay to identical dendrograms") {
    Rng rng(44);
    const Histogram h = random_hist(rng);
    const auto a = agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassDifference);
    const auto b = agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassDifference);
    REQUIRE(a.merges.size() == b.merges.size());
    for (std::size_t i = 0; i < a.merges.size(); ++i) {
        CHECK(a.merges[i].left.lo == b.merges[i].left.lo);
        CHECK(a.merges[i].right.hi == b.merges[i].right.hi);
        CHECK(a.merges[i].distance == b.merges[i].distance);
    }
}

TEST_CASE("isolated spike pairs merge at mass-sum cost regardless of gap") {
    // For two point clusters the union variance reduces to the pair's
    // between-term, so the separation cancels: dist = P_a + P_b under the
    // mass-product weighting. Distant stray levels chain as cheaply as
    // near ones; bimodal sanity tests must avoid low-mass stray bins.
    const Histogram h = hist_from({{10, 0.01}, {20, 0.01}, {100, 0.01}, {240, 0.97}});
    const auto c = init_clusters(h);
    REQUIRE(c.size() == 4);
    const double near_d = merge_distance(c[0], c[1], h, zero_cm(), ClusterWeighting::MassProduct);
    const double far_d = merge_distance(c[1], c[2], h, zero_cm(), ClusterWeighting::MassProduct);
    CHECK(near_d == doctest::Approx(0.02).epsilon(1e-9));
    CHECK(far_d == doctest::Approx(near_d).epsilon(1e-9));
}

TEST_CASE("smooth bimodal mixtures cut near the global-variance split") {
    // Discretized two-Gaussian mixture, random weight per draw. Uses the
    // mass-product weighting: the mass-difference form scores equal-mass
    // pairs 0, so it merges the modes early and cannot track a variance
    // split.
    Rng rng(45);
    int within = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const double w = 0.35 + 0.3 * rng.uniform();
        Histogram h;
        for (int l = 0; l < 256; ++l) {
            const double a = std::exp(-0.5 * std::pow((l - 60.0) / 10.0, 2));
            const double b = std::exp(-0.5 * std::pow((l - 190.0) / 10.0, 2));
            h.counts(l) = std::llround(20000.0 * (w * a + (1.0 - w) * b) /
                                       (10.0 * std::sqrt(2.0 * std::numbers::pi)));
        }
        h.total = h.counts.sum();
        for (int l = 0; l < 256; ++l)
            h.pdf(l) = static_cast<double>(h.counts(l)) / static_cast<double>(h.total);
        const Dendrogram d =
            agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassProduct);
        const int t = cut(d, 2)[0];
        if (std::abs(t - oracles::exhaustive_otsu(h)) <= 2) ++within;
    }
    CHECK(within >= 18);
}

TEST_CASE("merge trace lists one record per line") {
    const Histogram h = hist_from({{10, 0.45}, {30, 0.45}, {200, 0.1}});
    const Dendrogram d =
        agglomerate(init_clusters(h), h, zero_cm(), 2, ClusterWeighting::MassDifference);
    std::ostringstream os;
    write_merge_trace(os, d);
    const std::string trace = os.str();
    CHECK(trace.find("10..10") != std::string::npos);
    CHECK(trace.find("30..30") != std::string::npos);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1);
}
