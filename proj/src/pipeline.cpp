#include "mammo/pipeline.hpp"

#include "mammo/clahe.hpp"
#include "mammo/glcm.hpp"
#include "mammo/hcluster.hpp"
#include "mammo/imaging.hpp"
#include "mammo/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mammo {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "pyramid_depth")
            cfg.pyramid_depth = std::stoi(value);
        else if (key == "clahe_clip")
            cfg.clahe_clip = std::stod(value);
        else if (key == "clahe_tiles_x")
            cfg.clahe_tiles_x = std::stoi(value);
        else if (key == "clahe_tiles_y")
            cfg.clahe_tiles_y = std::stoi(value);
        else if (key == "level_parameter")
            cfg.level_parameter = std::stoi(value);
        else if (key == "coverage")
            cfg.coverage = std::stod(value);
        else if (key == "min_prestige")
            cfg.min_prestige = std::stoi(value);
        else if (key == "ring_width")
            cfg.ring_width = std::stoi(value);
        else if (key == "otsu_weighting")
            cfg.otsu_weighting = std::stoi(value) != 0;
        else if (key == "legacy_distance_merge")
            cfg.legacy_distance_merge = std::stoi(value) != 0;
        else if (key == "seed")
            cfg.seed = std::stoull(value);
        else
            throw InvalidConfig("unknown config key: " + key);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw InvalidConfig("bad value for config key " + key + ": " + value);
    }
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.pyramid_depth < 0) throw InvalidConfig("pyramid_depth must be >= 0");
    if (cfg.clahe_clip <= 0.0) throw InvalidConfig("clahe_clip must be > 0");
    if (cfg.clahe_tiles_x < 1 || cfg.clahe_tiles_y < 1)
        throw InvalidConfig("clahe tile counts must be >= 1");
    if (cfg.level_parameter < 2) throw InvalidConfig("level_parameter must be >= 2");
    if (cfg.coverage <= 0.0 || cfg.coverage > 1.0)
        throw InvalidConfig("coverage must be in (0, 1]");
    if (cfg.min_prestige < 1) throw InvalidConfig("min_prestige must be >= 1");
    if (cfg.ring_width < 1) throw InvalidConfig("ring_width must be >= 1");
}

}  // namespace

PipelineConfig load_config(std::istream& is) {
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw InvalidConfig("config line " + std::to_string(lineno) + ": empty key or value");
        set_config_key(cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidConfig("cannot open config file: " + path);
    return load_config(is);
}

void save_config(std::ostream& os, const PipelineConfig& cfg) {
    os << "pyramid_depth=" << cfg.pyramid_depth << "\n";
    os << "clahe_clip=" << format_double(cfg.clahe_clip) << "\n";
    os << "clahe_tiles_x=" << cfg.clahe_tiles_x << "\n";
    os << "clahe_tiles_y=" << cfg.clahe_tiles_y << "\n";
    os << "level_parameter=" << cfg.level_parameter << "\n";
    os << "coverage=" << format_double(cfg.coverage) << "\n";
    os << "min_prestige=" << cfg.min_prestige << "\n";
    os << "ring_width=" << cfg.ring_width << "\n";
    os << "otsu_weighting=" << (cfg.otsu_weighting ? 1 : 0) << "\n";
    os << "legacy_distance_merge=" << (cfg.legacy_distance_merge ? 1 : 0) << "\n";
    os << "seed=" << cfg.seed << "\n";
}

void save_config(const std::string& path, const PipelineConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw CorruptFile("cannot open config file for writing: " + path);
    save_config(os, cfg);
}

std::string encode_mask_rle(const Mask& mask) {
    std::string out;
    for (int r = 0; r < mask.rows(); ++r) {
        int c = 0;
        while (c < mask.cols()) {
            if (!mask(r, c)) {
                ++c;
                continue;
            }
            int end = c;
            while (end + 1 < mask.cols() && mask(r, end + 1)) ++end;
            if (!out.empty()) out += ';';
            out += std::to_string(r);
            out += ':';
            out += std::to_string(c);
            out += ':';
            out += std::to_string(end);
            c = end + 1;
        }
    }
    return out;
}

Mask decode_mask_rle(const std::string& rle, int rows, int cols) {
    Mask mask = Mask::Zero(rows, cols);
    std::size_t pos = 0;
    while (pos < rle.size()) {
        std::size_t next = rle.find(';', pos);
        if (next == std::string::npos) next = rle.size();
        const std::string run = rle.substr(pos, next - pos);
        int r = 0, c0 = 0, c1 = 0;
        if (std::sscanf(run.c_str(), "%d:%d:%d", &r, &c0, &c1) != 3 || r < 0 || r >= rows ||
            c0 < 0 || c1 < c0 || c1 >= cols)
            throw CorruptFile("bad mask run: " + run);
        for (int c = c0; c <= c1; ++c) mask(r, c) = 1;
        pos = next + 1;
    }
    return mask;
}

ImageDetections detect_image(const GrayImage& img, const std::string& image_id,
                             const PipelineConfig& cfg, const SvmModel* model) {
    validate_config(cfg);
    ImageDetections out;
    out.image_id = image_id;
    out.standardized = standardize(img);
    const GrayImage& img8 = out.standardized;
    const int full_rows = img8.height(), full_cols = img8.width();
    if ((img8.pixels != 0).count() == 0) return out;  // flat black: nothing to segment

    const BreastMask breast = breast_mask(img8);
    const auto pyr = gaussian_pyramid(img8, cfg.pyramid_depth + 1);
    const GrayImage& working = pyr.back().image;
    const int rows = working.height(), cols = working.width();
    const GrayImage eq = clahe(working, cfg.clahe_clip, cfg.clahe_tiles_x, cfg.clahe_tiles_y);

    // Carry the breast mask to working scale by block-center sampling.
    const int f = 1 << cfg.pyramid_depth;
    Mask wmask(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            wmask(r, c) = breast(std::min(r * f + f / 2, full_rows - 1),
                                 std::min(c * f + f / 2, full_cols - 1));

    const Histogram hist = histogram(eq, &wmask);
    int occupied = 0;
    for (std::int64_t count : hist.counts) occupied += count > 0 ? 1 : 0;
    if (occupied < cfg.level_parameter) return out;  // too flat for an m-level cut

    CooccurrenceMatrix cm;
    try {
        cm = build_glcm(eq, &wmask);
    } catch (const EmptyOverlap&) {
        return out;  // no co-occurring in-mask pairs: degenerate mask
    }
    const auto weighting =
        cfg.otsu_weighting ? ClusterWeighting::MassProduct : ClusterWeighting::MassDifference;
    const Dendrogram dendro =
        agglomerate(init_clusters(hist), hist, cm, cfg.level_parameter, weighting);
    const ThresholdSet thresholds = cut(dendro, cfg.level_parameter);

    std::vector<Mask> layers = threshold_layers(eq, thresholds);
    for (Mask& layer : layers) layer = (layer != 0 && wmask != 0).cast<std::uint8_t>();

    std::vector<std::vector<LabeledRegion>> levels(layers.size());
    for (std::size_t k = 0; k < layers.size(); ++k) {
        levels[k] = label_components(layers[k]);
        for (LabeledRegion& region : levels[k]) region.level_index = static_cast<int>(k) + 1;
    }
    std::reverse(levels.begin(), levels.end());  // densest first

    const auto rule = cfg.legacy_distance_merge ? MergeRule::CentroidDistance : MergeRule::Coverage;
    const std::vector<LabeledRegion> retained =
        accumulate_prestige(levels, rows, cols, cfg.coverage, cfg.min_prestige, rule, 0.2);

    int roi_id = 0;
    for (const LabeledRegion& region : retained) {
        const RoiCandidate roi = upsample_roi(region, cfg.pyramid_depth, full_rows, full_cols);
        DetectionRecord rec;
        rec.image_id = image_id;
        rec.height = full_rows;
        rec.width = full_cols;
        rec.roi_id = ++roi_id;
        rec.min_row = roi.min_row;
        rec.min_col = roi.min_col;
        rec.max_row = roi.max_row;
        rec.max_col = roi.max_col;
        rec.centroid_row = roi.centroid_row;
        rec.centroid_col = roi.centroid_col;
        rec.area = static_cast<std::int64_t>(roi.mask.cast<std::int64_t>().sum());
        rec.prestige = roi.prestige;
        rec.level = roi.level_index;
        try {
            rec.features = extract_features(img8, roi, breast, cfg.ring_width);
            rec.rejected = rec.features.region_contrast <= 0.0;
        } catch (const Error&) {
            rec.rejected = true;  // ring empty or shape too small to measure
        }
        if (model != nullptr && !rec.rejected) {
            rec.score = decision_value(*model, rec.features.as_vector());
            rec.predicted = rec.score > 0.0 ? +1 : -1;
        }
        rec.mask_rle = encode_mask_rle(roi.mask);
        out.records.push_back(std::move(rec));
        out.masks.push_back(roi.mask);
    }
    return out;
}

GrayImage render_overlay(const GrayImage& standardized, const std::vector<Mask>& masks) {
    GrayImage overlay = standardized;
    const int rows = overlay.height(), cols = overlay.width();
    for (const Mask& mask : masks) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                if (!mask(r, c)) continue;
                const bool boundary = r == 0 || r == rows - 1 || c == 0 || c == cols - 1 ||
                                      !mask(r - 1, c) || !mask(r + 1, c) || !mask(r, c - 1) ||
                                      !mask(r, c + 1);
                if (boundary) overlay.pixels(r, c) = overlay.max_value();
            }
        }
    }
    return overlay;
}

namespace {

constexpr const char* kRecordsHeader =
    "image_id,height,width,roi_id,min_row,min_col,max_row,max_col,centroid_row,centroid_col,"
    "area,prestige,level,region_contrast,mean_gradient,entropy,std_dev,compactness,rejected,"
    "score,predicted,mask_rle";
constexpr const char* kFeaturesHeader =
    "image_id,roi_id,region_contrast,mean_gradient,entropy,std_dev,compactness,label";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<DetectionRecord>& records) {
    os << kRecordsHeader << "\n";
    for (const DetectionRecord& r : records) {
        os << r.image_id << ',' << r.height << ',' << r.width << ',' << r.roi_id << ','
           << r.min_row << ',' << r.min_col << ',' << r.max_row << ',' << r.max_col << ','
           << format_double(r.centroid_row) << ',' << format_double(r.centroid_col) << ','
           << r.area << ',' << r.prestige << ',' << r.level << ','
           << format_double(r.features.region_contrast) << ','
           << format_double(r.features.mean_gradient) << ',' << format_double(r.features.entropy)
           << ',' << format_double(r.features.std_dev) << ','
           << format_double(r.features.compactness) << ',' << (r.rejected ? 1 : 0) << ','
           << format_double(r.score) << ',' << r.predicted << ',' << r.mask_rle << "\n";
    }
}

std::vector<DetectionRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CorruptFile("records file: empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRecordsHeader) throw CorruptFile("records file: unexpected header");
    std::vector<DetectionRecord> records;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 22)
            throw CorruptFile("records line " + std::to_string(lineno) + ": expected 22 fields");
        DetectionRecord r;
        try {
            r.image_id = f[0];
            r.height = std::stoi(f[1]);
            r.width = std::stoi(f[2]);
            r.roi_id = std::stoi(f[3]);
            r.min_row = std::stoi(f[4]);
            r.min_col = std::stoi(f[5]);
            r.max_row = std::stoi(f[6]);
            r.max_col = std::stoi(f[7]);
            r.centroid_row = std::stod(f[8]);
            r.centroid_col = std::stod(f[9]);
            r.area = std::stoll(f[10]);
            r.prestige = std::stoi(f[11]);
            r.level = std::stoi(f[12]);
            r.features.region_contrast = std::stod(f[13]);
            r.features.mean_gradient = std::stod(f[14]);
            r.features.entropy = std::stod(f[15]);
            r.features.std_dev = std::stod(f[16]);
            r.features.compactness = std::stod(f[17]);
            r.rejected = std::stoi(f[18]) != 0;
            r.score = std::stod(f[19]);
            r.predicted = std::stoi(f[20]);
            r.mask_rle = f[21];
        } catch (const std::exception&) {
            throw CorruptFile("records line " + std::to_string(lineno) + ": bad field");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<DetectionRecord> read_records_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CorruptFile("cannot open records file: " + path);
    return read_records_csv(is);
}

std::vector<int> truth_labels(const std::vector<DetectionRecord>& records,
                              const std::vector<TruthEntry>& truths, bool flip_y) {
    std::map<std::string, std::vector<const TruthEntry*>> by_id;
    for (const TruthEntry& t : truths) by_id[t.id].push_back(&t);
    std::vector<int> labels;
    labels.reserve(records.size());
    for (const DetectionRecord& rec : records) {
        const auto it = by_id.find(rec.image_id);
        if (it == by_id.end()) {
            labels.push_back(0);
            continue;
        }
        int label = -1;
        RoiCandidate roi;
        roi.mask = decode_mask_rle(rec.mask_rle, rec.height, rec.width);
        roi.centroid_row = rec.centroid_row;
        roi.centroid_col = rec.centroid_col;
        for (const TruthEntry* t : it->second) {
            if (!t->has_circle) continue;
            const auto [trow, tcol] = truth_to_rowcol(*t, rec.height, flip_y);
            if (match_detection(roi, trow, tcol, t->radius)) {
                label = +1;
                break;
            }
        }
        labels.push_back(label);
    }
    return labels;
}

void write_features_csv(std::ostream& os, const std::vector<DetectionRecord>& records,
                        const std::vector<int>& labels) {
    if (labels.size() != records.size())
        throw DimensionMismatch("feature table: one label per record required");
    os << kFeaturesHeader << "\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const DetectionRecord& r = records[i];
        if (r.rejected) continue;
        os << r.image_id << ',' << r.roi_id << ',' << format_double(r.features.region_contrast)
           << ',' << format_double(r.features.mean_gradient) << ','
           << format_double(r.features.entropy) << ',' << format_double(r.features.std_dev) << ','
           << format_double(r.features.compactness) << ',' << labels[i] << "\n";
    }
}

std::vector<FeatureRow> read_features_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CorruptFile("feature table: empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kFeaturesHeader) throw CorruptFile("feature table: unexpected header");
    std::vector<FeatureRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 8)
            throw CorruptFile("feature line " + std::to_string(lineno) + ": expected 8 fields");
        FeatureRow row;
        try {
            row.image_id = f[0];
            row.roi_id = std::stoi(f[1]);
            row.features.region_contrast = std::stod(f[2]);
            row.features.mean_gradient = std::stod(f[3]);
            row.features.entropy = std::stod(f[4]);
            row.features.std_dev = std::stod(f[5]);
            row.features.compactness = std::stod(f[6]);
            row.label = std::stoi(f[7]);
        } catch (const std::exception&) {
            throw CorruptFile("feature line " + std::to_string(lineno) + ": bad field");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FeatureRow> read_features_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CorruptFile("cannot open feature table: " + path);
    return read_features_csv(is);
}

DetectionStats detection_stats(const std::vector<DetectionRecord>& records,
                               const std::vector<TruthEntry>& truths, bool flip_y) {
    std::map<std::string, std::vector<const DetectionRecord*>> by_id;
    for (const DetectionRecord& r : records) by_id[r.image_id].push_back(&r);
    DetectionStats stats;
    for (const TruthEntry& t : truths) {
        if (!t.has_circle) continue;
        ++stats.truth_circles;
        const auto it = by_id.find(t.id);
        if (it == by_id.end()) continue;
        for (const DetectionRecord* rec : it->second) {
            RoiCandidate roi;
            roi.mask = decode_mask_rle(rec->mask_rle, rec->height, rec->width);
            roi.centroid_row = rec->centroid_row;
            roi.centroid_col = rec->centroid_col;
            const auto [trow, tcol] = truth_to_rowcol(t, rec->height, flip_y);
            if (match_detection(roi, trow, tcol, t.radius)) {
                ++stats.matched;
                break;
            }
        }
    }
    return stats;
}

}  // namespace mammo
