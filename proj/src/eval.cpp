#include "mammo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace mammo {

std::vector<TruthEntry> read_truth(std::istream& is) {
    std::vector<TruthEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok.size() < 3)
            throw CorruptFile("truth line " + std::to_string(lineno) + ": too few fields");
        TruthEntry e;
        e.id = tok[0];
        e.tissue = tok[1];
        e.cls = tok[2];
        if (e.cls == "NORM") {
            e.is_normal = true;
        } else if (tok.size() >= 7) {
            e.severity = tok[3];
            try {
                e.x = std::stod(tok[4]);
                e.y = std::stod(tok[5]);
                e.radius = std::stod(tok[6]);
            } catch (const std::exception&) {
                throw CorruptFile("truth line " + std::to_string(lineno) + ": bad coordinates");
            }
            if (e.radius <= 0.0)
                throw CorruptFile("truth line " + std::to_string(lineno) + ": radius must be > 0");
            e.has_circle = true;
        } else if (tok.size() >= 4) {
            e.severity = tok[3];  // lesion row without a marked circle
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<TruthEntry> read_truth(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CorruptFile("cannot open truth file: " + path);
    return read_truth(is);
}

void write_truth(std::ostream& os, const std::vector<TruthEntry>& entries) {
    for (const TruthEntry& e : entries) {
        if (e.is_normal) {
            os << e.id << " " << e.tissue << " NORM\n";
        } else {
            os << e.id << " " << e.tissue << " " << e.cls << " " << e.severity << " " << e.x
               << " " << e.y << " " << e.radius << "\n";
        }
    }
}

std::pair<double, double> truth_to_rowcol(const TruthEntry& t, int image_height, bool flip_y) {
    const double row = flip_y ? t.y : static_cast<double>(image_height - 1) - t.y;
    return {row, t.x};
}

bool match_detection(const RoiCandidate& roi, double truth_row, double truth_col, double radius) {
    const double dr = roi.centroid_row - truth_row;
    const double dc = roi.centroid_col - truth_col;
    if (dr * dr + dc * dc <= radius * radius) return true;
    const int r = static_cast<int>(std::lround(truth_row));
    const int c = static_cast<int>(std::lround(truth_col));
    return r >= 0 && r < roi.mask.rows() && c >= 0 && c < roi.mask.cols() && roi.mask(r, c) != 0;
}

RocCurve roc(const std::vector<std::pair<double, int>>& scored) {
    std::int64_t P = 0, N = 0;
    for (const auto& [score, label] : scored) (label > 0 ? P : N) += 1;
    if (P == 0 || N == 0) throw SingleClass("ROC needs both labels");
    std::vector<std::pair<double, int>> sorted = scored;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0, area2 = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double s = sorted[i].first;
        std::int64_t dtp = 0, dfp = 0;
        while (i < sorted.size() && sorted[i].first == s) {
            (sorted[i].second > 0 ? dtp : dfp) += 1;
            ++i;
        }
        area2 += dfp * (2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(N),
                                  static_cast<double>(tp) / static_cast<double>(P));
    }
    curve.auc = static_cast<double>(area2) / static_cast<double>(2 * P * N);
    return curve;
}

void write_roc_csv(std::ostream& os, const RocCurve& curve) {
    os << std::setprecision(17);
    for (const auto& [fpr, tpr] : curve.points) os << fpr << "," << tpr << "\n";
    os << "auc," << curve.auc << "\n";
}

double fp_per_image(const std::vector<std::pair<std::string, int>>& positives_per_image,
                    const std::vector<TruthEntry>& truths) {
    std::set<std::string> normals;
    for (const TruthEntry& t : truths)
        if (t.is_normal) normals.insert(t.id);
    std::int64_t total = 0, images = 0;
    for (const auto& [id, count] : positives_per_image) {
        if (!normals.count(id)) continue;
        total += count;
        ++images;
    }
    if (images == 0) throw NoNormals("no processed image is marked normal in the truth file");
    return static_cast<double>(total) / static_cast<double>(images);
}

EvalMetrics sensitivity_specificity(std::int64_t tp, std::int64_t fn, std::int64_t tn,
                                    std::int64_t fp) {
    EvalMetrics m;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (tp + fn > 0) {
        m.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        m.sensitivity = nan;
        m.sensitivity_defined = false;
    }
    if (tn + fp > 0) {
        m.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
    } else {
        m.specificity = nan;
        m.specificity_defined = false;
    }
    m.harmonic_mean = (m.sensitivity_defined && m.specificity_defined)
                          ? harmonic_mean(m.sensitivity, m.specificity)
                          : nan;
    return m;
}

}  // namespace mammo
