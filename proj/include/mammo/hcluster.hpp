#pragma once

#include "mammo/core.hpp"
#include "mammo/glcm.hpp"

#include <iosfwd>
#include <vector>

namespace mammo {

/// One contiguous band of occupied gray levels with its histogram mass and
/// mean intensity.
struct ClusterStats {
    int lo = 0;
    int hi = 0;
    double mass = 0.0;
    double mean = 0.0;

    GrayRange range() const { return {lo, hi}; }
};

/// Weighting of the mass term in the cluster dissimilarity. MassDifference
/// is the published form (P_a - P_b)^2; MassProduct substitutes the
/// classical between-class P_a * P_b.
enum class ClusterWeighting { MassDifference, MassProduct };

struct MergeRecord {
    ClusterStats left;
    ClusterStats right;
    double distance = 0.0;
    int step = 0;
};

/// Agglomeration history: the initial singleton clusters, every merge in
/// order, and the surviving clusters at the stopping point. Any cut between
/// the final and the initial cluster count can be reconstructed by replay.
struct Dendrogram {
    std::vector<ClusterStats> initial;
    std::vector<MergeRecord> merges;
    std::vector<ClusterStats> final_clusters;
};

using ThresholdSet = std::vector<int>;  // strictly increasing gray levels

/// One singleton cluster per occupied gray level, in ascending order.
/// Throws EmptyHistogram when no level is occupied.
std::vector<ClusterStats> init_clusters(const Histogram& h);

/// Dissimilarity between two range-adjacent clusters:
///
///   dist = (1 - CP_ab) * weight(P_a, P_b) * (mean_a - mean_b)^2 / var_ab
///
/// where CP_ab is the normalized co-occurrence between the two ranges,
/// weight is (P_a - P_b)^2 (or P_a*P_b under MassProduct), and var_ab is the
/// histogram variance of the union range about the mass-weighted combined
/// mean. Degenerate unions (var < 1e-12) score 0 so they merge immediately.
/// Throws NotAdjacent when an occupied level separates the clusters or they
/// are out of order.
double merge_distance(const ClusterStats& a, const ClusterStats& b, const Histogram& h,
                      const CooccurrenceMatrix& cm,
                      ClusterWeighting weighting = ClusterWeighting::MassDifference);

/// Greedy agglomeration: repeatedly merges the adjacent pair with the
/// minimum distance until m clusters remain. Ties resolve to the pair at the
/// lowest gray level, making the procedure fully deterministic. A merged
/// cluster's statistics are recomputed from the histogram over the union
/// range. Throws TooFewLevels when fewer than m levels are occupied.
Dendrogram agglomerate(const std::vector<ClusterStats>& clusters, const Histogram& h,
                       const CooccurrenceMatrix& cm, int m,
                       ClusterWeighting weighting = ClusterWeighting::MassDifference);

/// Thresholds for an m-cluster cut: the hi bounds of the first m-1 surviving
/// clusters, ascending. Throws InvalidCut when the dendrogram never holds
/// exactly m clusters.
ThresholdSet cut(const Dendrogram& d, int m);

/// Plain-text merge trace, one record per line:
/// step lo_a..hi_a lo_b..hi_b distance
void write_merge_trace(std::ostream& os, const Dendrogram& d);

}  // namespace mammo
