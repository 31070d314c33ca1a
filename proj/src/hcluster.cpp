#include "mammo/hcluster.hpp"

#include <limits>
#include <ostream>

namespace mammo {

namespace {

ClusterStats stats_over_range(int lo, int hi, const Histogram& h) {
    ClusterStats s;
    s.lo = lo;
    s.hi = hi;
    double mass = 0.0, first_moment = 0.0;
    for (int l = lo; l <= hi; ++l) {
        mass += h.pdf[l];
        first_moment += l * h.pdf[l];
    }
    s.mass = mass;
    s.mean = mass > 0.0 ? first_moment / mass : 0.5 * (lo + hi);
    return s;
}

}  // namespace

std::vector<ClusterStats> init_clusters(const Histogram& h) {
    std::vector<ClusterStats> clusters;
    for (int l = 0; l < 256; ++l) {
        if (h.counts[l] > 0) clusters.push_back({l, l, h.pdf[l], static_cast<double>(l)});
    }
    if (clusters.empty()) throw EmptyHistogram("init_clusters: histogram has no occupied level");
    return clusters;
}

double merge_distance(const ClusterStats& a, const ClusterStats& b, const Histogram& h,
                      const CooccurrenceMatrix& cm, ClusterWeighting weighting) {
    if (a.hi >= b.lo) throw NotAdjacent("merge_distance: clusters out of order or overlapping");
    for (int l = a.hi + 1; l < b.lo; ++l)
        if (h.counts[l] > 0) throw NotAdjacent("merge_distance: occupied level between clusters");

    const double cp = cluster_cooccurrence(cm, a.range(), b.range());

    const double total_mass = a.mass + b.mass;
    if (total_mass <= 0.0) return 0.0;
    const double combined_mean = (a.mass * a.mean + b.mass * b.mean) / total_mass;

    double var = 0.0;
    for (int l = a.lo; l <= b.hi; ++l) {
        const double d = l - combined_mean;
        var += d * d * h.pdf[l];
    }
    if (var < 1e-12) return 0.0;

    const double mass_term = weighting == ClusterWeighting::MassDifference
                                 ? (a.mass - b.mass) * (a.mass - b.mass)
                                 : a.mass * b.mass;
    const double mean_gap = a.mean - b.mean;
    return (1.0 - cp) * mass_term * mean_gap * mean_gap / var;
}

Dendrogram agglomerate(const std::vector<ClusterStats>& clusters, const Histogram& h,
                       const CooccurrenceMatrix& cm, int m, ClusterWeighting weighting) {
    if (m < 2) throw InvalidCut("agglomerate: level parameter must be >= 2");
    if (static_cast<int>(clusters.size()) < m)
        throw TooFewLevels("agglomerate: fewer occupied levels than clusters requested");

    Dendrogram d;
    d.initial = clusters;

    std::vector<ClusterStats> cur = clusters;
    std::vector<double> dist(cur.size() > 0 ? cur.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i)
        dist[i] = merge_distance(cur[i], cur[i + 1], h, cm, weighting);

    int step = 0;
    while (static_cast<int>(cur.size()) > m) {
        // first strict minimum = lowest gray-level pair on ties
        std::size_t best = 0;
        for (std::size_t i = 1; i < dist.size(); ++i)
            if (dist[i] < dist[best]) best = i;

        d.merges.push_back({cur[best], cur[best + 1], dist[best], step++});

        const ClusterStats merged = stats_over_range(cur[best].lo, cur[best + 1].hi, h);
        cur[best] = merged;
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(best) + 1);
        dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(best));
        // only the distances touching the merged cluster change
        if (best > 0) dist[best - 1] = merge_distance(cur[best - 1], cur[best], h, cm, weighting);
        if (best + 1 < cur.size()) dist[best] = merge_distance(cur[best], cur[best + 1], h, cm, weighting);
    }
    d.final_clusters = std::move(cur);
    return d;
}

ThresholdSet cut(const Dendrogram& d, int m) {
    const int initial = static_cast<int>(d.initial.size());
    const int final_count = initial - static_cast<int>(d.merges.size());
    if (m < 1 || m > initial || m < final_count)
        throw InvalidCut("cut: dendrogram never holds the requested cluster count");

    // replay merges until m clusters remain
    std::vector<ClusterStats> cur = d.initial;
    for (int k = 0; k < initial - m; ++k) {
        const MergeRecord& rec = d.merges[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            if (cur[i].lo == rec.left.lo && cur[i + 1].hi == rec.right.hi) {
                cur[i].hi = cur[i + 1].hi;
                cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                break;
            }
        }
    }

    ThresholdSet t;
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) t.push_back(cur[i].hi);
    return t;
}

void write_merge_trace(std::ostream& os, const Dendrogram& d) {
    for (const MergeRecord& r : d.merges) {
        os << r.step << " " << r.left.lo << ".." << r.left.hi << " " << r.right.lo << ".."
           << r.right.hi << " " << r.distance << "\n";
    }
}

}  // namespace mammo
