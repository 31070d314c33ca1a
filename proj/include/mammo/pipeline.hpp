#pragma once

#include "mammo/core.hpp"
#include "mammo/eval.hpp"
#include "mammo/features.hpp"
#include "mammo/segment.hpp"
#include "mammo/svm.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mammo {

struct PipelineConfig {
    int pyramid_depth = 2;
    double clahe_clip = 2.0;
    int clahe_tiles_x = 8;
    int clahe_tiles_y = 8;
    int level_parameter = 5;  // cluster count m; cut yields m-1 thresholds
    double coverage = 0.8;
    int min_prestige = 3;
    int ring_width = 10;
    bool otsu_weighting = false;        // mass-product distance instead of (P_a-P_b)^2
    bool legacy_distance_merge = false;  // centroid-distance prestige forwarding
    std::uint64_t seed = 0;
};

/// Flat key=value text, # comments; unknown keys and out-of-range values
/// raise InvalidConfig.
PipelineConfig load_config(std::istream& is);
PipelineConfig load_config(const std::string& path);
void save_config(std::ostream& os, const PipelineConfig& cfg);
void save_config(const std::string& path, const PipelineConfig& cfg);

struct DetectionRecord {
    std::string image_id;
    int height = 0, width = 0;
    int roi_id = 0;
    int min_row = 0, min_col = 0, max_row = 0, max_col = 0;
    double centroid_row = 0.0, centroid_col = 0.0;
    std::int64_t area = 0;
    int prestige = 0;
    int level = 0;
    FeatureVector features;
    bool rejected = false;  // non-positive contrast or failed extraction
    double score = 0.0;     // decision value; 0 when unclassified
    int predicted = 0;      // +1/-1, 0 = no model applied
    std::string mask_rle;   // "row:col_first:col_last;..." inclusive runs
};

std::string encode_mask_rle(const Mask& mask);
Mask decode_mask_rle(const std::string& rle, int rows, int cols);

struct ImageDetections {
    std::string image_id;
    GrayImage standardized;
    std::vector<DetectionRecord> records;
    std::vector<Mask> masks;  // parallel to records, full resolution
};

/// Full single-image pipeline: standardize, breast mask, pyramid, CLAHE,
/// masked GLCM, cluster-cut thresholds, nested layers, prestige merge,
/// upsample, features, optional classification. Images whose working-scale
/// histogram occupies fewer than level_parameter gray levels produce zero
/// candidates rather than an error.
ImageDetections detect_image(const GrayImage& img, const std::string& image_id,
                             const PipelineConfig& cfg, const SvmModel* model = nullptr);

/// Standardized image with every candidate's boundary pixels set to 255.
GrayImage render_overlay(const GrayImage& standardized, const std::vector<Mask>& masks);

void write_records_csv(std::ostream& os, const std::vector<DetectionRecord>& records);
std::vector<DetectionRecord> read_records_csv(std::istream& is);
std::vector<DetectionRecord> read_records_csv(const std::string& path);

/// Per-record truth label: +1 when the candidate matches any truth circle of
/// its image, -1 otherwise, 0 when the image id has no truth rows.
std::vector<int> truth_labels(const std::vector<DetectionRecord>& records,
                              const std::vector<TruthEntry>& truths, bool flip_y = false);

struct FeatureRow {
    std::string image_id;
    int roi_id = 0;
    FeatureVector features;
    int label = 0;
};

void write_features_csv(std::ostream& os, const std::vector<DetectionRecord>& records,
                        const std::vector<int>& labels);
std::vector<FeatureRow> read_features_csv(std::istream& is);
std::vector<FeatureRow> read_features_csv(const std::string& path);

struct DetectionStats {
    int truth_circles = 0;
    int matched = 0;
    double accuracy() const {
        return truth_circles == 0 ? 0.0
                                  : static_cast<double>(matched) / static_cast<double>(truth_circles);
    }
};

/// Fraction of truth circles hit by at least one candidate (rejected ones
/// included: this measures the detector, not the classifier).
DetectionStats detection_stats(const std::vector<DetectionRecord>& records,
                               const std::vector<TruthEntry>& truths, bool flip_y = false);

}  // namespace mammo
