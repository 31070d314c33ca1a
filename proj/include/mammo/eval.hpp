#pragma once

#include "mammo/core.hpp"
#include "mammo/metrics.hpp"
#include "mammo/segment.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mammo {

/// One truth-file row: either a NORM marker or a lesion circle. Coordinates
/// keep the file's convention (x from left, y per the file's origin) until
/// truth_to_rowcol converts them.
struct TruthEntry {
    std::string id;
    std::string tissue;
    std::string cls;       // NORM or a lesion class
    std::string severity;  // B / M, empty for NORM
    double x = 0.0, y = 0.0, radius = 0.0;
    bool is_normal = false;
    bool has_circle = false;  // abnormal rows lacking coordinates exist in MIAS
};

/// Lines `id tissue NORM` or `id tissue class severity x y radius`.
std::vector<TruthEntry> read_truth(std::istream& is);
std::vector<TruthEntry> read_truth(const std::string& path);
void write_truth(std::ostream& os, const std::vector<TruthEntry>& entries);

/// (row, col) of the truth center. Default treats y as measured from the
/// bottom edge (MIAS convention); flip_y means the file already uses
/// top-left row coordinates.
std::pair<double, double> truth_to_rowcol(const TruthEntry& t, int image_height,
                                          bool flip_y = false);

/// Hit test: ROI centroid inside the circle, or circle center inside the
/// ROI mask (covers ring-shaped ROIs whose centroid falls in a hole).
bool match_detection(const RoiCandidate& roi, double truth_row, double truth_col, double radius);

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
};

/// Threshold sweep over distinct scores descending, tied scores grouped into
/// one vertex. The trapezoid area is accumulated in integers so the result
/// equals the concordant-pair statistic exactly. Labels are +1 / -1.
RocCurve roc(const std::vector<std::pair<double, int>>& scored);

/// Rows `fpr,tpr` followed by a final `auc,<value>` line.
void write_roc_csv(std::ostream& os, const RocCurve& curve);

/// Mean positive-ROI count over truth-normal images present in counts.
double fp_per_image(const std::vector<std::pair<std::string, int>>& positives_per_image,
                    const std::vector<TruthEntry>& truths);

/// Rates from a confusion table; a zero denominator yields NaN and clears
/// the corresponding defined flag instead of failing.
EvalMetrics sensitivity_specificity(std::int64_t tp, std::int64_t fn, std::int64_t tn,
                                    std::int64_t fp);

}  // namespace mammo
