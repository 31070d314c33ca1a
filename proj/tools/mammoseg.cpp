#include "mammo/eval.hpp"
#include "mammo/image_io.hpp"
#include "mammo/phantom.hpp"
#include "mammo/pipeline.hpp"
#include "mammo/svm.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace mammo;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw CorruptFile("cannot write " + path.string());
    return os;
}

struct DetectArgs {
    std::vector<std::string> images;
    std::string config_path, model_path, truth_path;
    std::string out_dir = ".";
    bool flip_y = false;
    std::optional<std::uint64_t> seed;
};

int run_detect(const DetectArgs& args) {
    PipelineConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    std::optional<SvmModel> model;
    if (!args.model_path.empty()) model = load_model(args.model_path);
    std::vector<TruthEntry> truths;
    if (!args.truth_path.empty()) truths = read_truth(args.truth_path);

    const fs::path out(args.out_dir);
    fs::create_directories(out / "overlays");

    std::vector<DetectionRecord> records;
    std::vector<std::pair<std::string, std::string>> manifest;  // path -> status
    for (const std::string& path : args.images) {
        const std::string id = fs::path(path).stem().string();
        try {
            const GrayImage img = load_image(path);
            const ImageDetections det =
                detect_image(img, id, cfg, model ? &*model : nullptr);
            records.insert(records.end(), det.records.begin(), det.records.end());
            save_png(render_overlay(det.standardized, det.masks),
                     (out / "overlays" / (id + ".png")).string());
            manifest.emplace_back(path, "ok");
        } catch (const std::exception& e) {
            manifest.emplace_back(path, std::string("failed: ") + e.what());
        }
    }

    {
        auto os = open_out(out / "records.csv");
        write_records_csv(os, records);
    }
    {
        const std::vector<int> labels =
            truths.empty() ? std::vector<int>(records.size(), 0)
                           : truth_labels(records, truths, args.flip_y);
        auto os = open_out(out / "features.csv");
        write_features_csv(os, records, labels);
    }
    save_config((out / "config.txt").string(), cfg);
    bool any_failed = false;
    {
        auto os = open_out(out / "manifest.txt");
        for (const auto& [path, status] : manifest) {
            os << path << " " << status << "\n";
            any_failed |= status != "ok";
        }
    }
    return any_failed ? 1 : 0;
}

struct TrainArgs {
    std::string features_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
};

int run_train(const TrainArgs& args) {
    std::vector<Sample> samples;
    for (const FeatureRow& row : read_features_csv(args.features_path)) {
        if (row.label == 0) continue;  // unlabeled rows cannot train
        samples.push_back({row.features.as_vector(), row.label});
    }
    const GridSearchResult gs = grid_search(samples, args.seed);
    const SvmModel model = train_svm(samples, gs.best);

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    save_model((out / "model.txt").string(), model);
    auto os = open_out(out / "cv_report.txt");
    os << "samples " << samples.size() << "\n";
    os << "seed " << gs.seed << "\n";
    os << "folds " << gs.fold_count << "\n";
    os << "best_C " << fmt(gs.best.C) << "\n";
    os << "best_sigma " << fmt(gs.best.sigma) << "\n";
    os << "mean_sensitivity " << fmt(gs.metrics.sensitivity) << "\n";
    os << "mean_specificity " << fmt(gs.metrics.specificity) << "\n";
    os << "mean_harmonic_mean " << fmt(gs.metrics.harmonic_mean) << "\n";
    os << "grid_mean_hm_rows_C_cols_sigma\n";
    for (int ci = 0; ci < 7; ++ci) {
        for (int si = 0; si < 7; ++si) os << (si ? " " : "") << fmt(gs.mean_hm(ci, si));
        os << "\n";
    }
    const auto per_fold = fold_metrics(samples, gs.fold_of, gs.fold_count, gs.best);
    for (std::size_t f = 0; f < per_fold.size(); ++f)
        os << "fold " << f << " sensitivity " << fmt(per_fold[f].sensitivity) << " specificity "
           << fmt(per_fold[f].specificity) << " harmonic_mean "
           << fmt(per_fold[f].harmonic_mean) << "\n";
    std::cout << "best C=" << gs.best.C << " sigma=" << gs.best.sigma
              << " mean HM=" << gs.metrics.harmonic_mean << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string records_path, truth_path, model_path;
    std::string out_dir = ".";
    bool flip_y = false;
};

int run_evaluate(const EvaluateArgs& args) {
    std::vector<DetectionRecord> records = read_records_csv(args.records_path);
    const std::vector<TruthEntry> truths = read_truth(args.truth_path);

    std::map<std::string, bool> truth_ids;
    for (const TruthEntry& t : truths) truth_ids[t.id] = true;
    for (const DetectionRecord& r : records)
        if (!truth_ids.count(r.image_id))
            throw IdMismatch("image id not in truth file: " + r.image_id);

    if (!args.model_path.empty()) {
        const SvmModel model = load_model(args.model_path);
        for (DetectionRecord& r : records) {
            if (r.rejected) continue;
            r.score = decision_value(model, r.features.as_vector());
            r.predicted = r.score > 0.0 ? +1 : -1;
        }
    }

    const fs::path out(args.out_dir);
    fs::create_directories(out);
    auto report = open_out(out / "report.txt");

    const DetectionStats det = detection_stats(records, truths, args.flip_y);
    std::map<std::string, int> processed;  // image id -> positive ROI count
    for (const DetectionRecord& r : records) processed.emplace(r.image_id, 0);
    report << "truth_circles " << det.truth_circles << "\n";
    report << "matched_circles " << det.matched << "\n";
    report << "detection_accuracy " << fmt(det.accuracy()) << "\n";

    const std::vector<int> labels = truth_labels(records, truths, args.flip_y);
    const bool classified =
        std::any_of(records.begin(), records.end(),
                    [](const DetectionRecord& r) { return r.predicted != 0; });
    if (classified) {
        std::int64_t tp = 0, fn = 0, tn = 0, fp = 0;
        std::vector<std::pair<double, int>> scored;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const DetectionRecord& r = records[i];
            if (r.rejected || r.predicted == 0 || labels[i] == 0) continue;
            scored.emplace_back(r.score, labels[i]);
            if (labels[i] > 0)
                (r.predicted > 0 ? tp : fn) += 1;
            else
                (r.predicted < 0 ? tn : fp) += 1;
        }
        const EvalMetrics m = sensitivity_specificity(tp, fn, tn, fp);
        report << "roi_tp " << tp << "\nroi_fn " << fn << "\nroi_tn " << tn << "\nroi_fp " << fp
               << "\n";
        report << "sensitivity " << fmt(m.sensitivity) << "\n";
        report << "specificity " << fmt(m.specificity) << "\n";
        report << "harmonic_mean " << fmt(m.harmonic_mean) << "\n";
        try {
            const RocCurve curve = roc(scored);
            auto os = open_out(out / "roc.csv");
            write_roc_csv(os, curve);
            report << "auc " << fmt(curve.auc) << "\n";
        } catch (const SingleClass&) {
            report << "auc nan\n";  // every scored candidate carries one label
        }
        for (std::size_t i = 0; i < records.size(); ++i)
            if (!records[i].rejected && records[i].predicted > 0)
                processed[records[i].image_id] += 1;
        report << "fp_per_image_basis post_classification\n";
    } else {
        for (const DetectionRecord& r : records)
            if (!r.rejected) processed[r.image_id] += 1;
        report << "fp_per_image_basis pre_classification\n";
    }
    try {
        std::vector<std::pair<std::string, int>> counts(processed.begin(), processed.end());
        report << "fp_per_image " << fmt(fp_per_image(counts, truths)) << "\n";
    } catch (const NoNormals&) {
        report << "fp_per_image nan\n";
    }
    return 0;
}

struct PhantomArgs {
    std::string out_dir = ".";
    int count = 40;
    std::uint64_t seed = 0;
};

int run_phantoms(const PhantomArgs& args) {
    const fs::path out(args.out_dir);
    fs::create_directories(out);
    std::vector<TruthEntry> truths;
    for (const Phantom& ph : make_phantoms(args.count, args.seed)) {
        save_pgm(ph.image, (out / (ph.id + ".pgm")).string());
        truths.insert(truths.end(), ph.truths.begin(), ph.truths.end());
    }
    auto os = open_out(out / "truth.txt");
    write_truth(os, truths);
    return 0;
}

int run_convert(const std::string& in, const std::string& out) {
    save_image(load_image(in), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised mass localization for grayscale mammograms"};
    app.require_subcommand(1);

    DetectArgs det;
    auto* cmd_detect = app.add_subcommand(
        "detect", "Run the localization pipeline over images, writing records and overlays");
    cmd_detect->add_option("images", det.images, "Input images (PGM or PNG)")->required();
    cmd_detect->add_option("--config", det.config_path, "Pipeline config (key=value lines)");
    cmd_detect->add_option("--model", det.model_path, "Trained SVM model for ROI classification");
    cmd_detect->add_option("--truth", det.truth_path, "Truth file for labeling the feature table");
    cmd_detect->add_option("--out", det.out_dir, "Output directory");
    cmd_detect->add_option("--seed", det.seed, "Override the config seed");
    cmd_detect->add_flag("--flip-y", det.flip_y, "Truth y is a top-left row, not bottom-left");

    TrainArgs train;
    auto* cmd_train = app.add_subcommand(
        "train", "Grid-search an RBF SVM over a labeled feature table and write the model");
    cmd_train->add_option("features", train.features_path, "Labeled feature table (features.csv)")
        ->required();
    cmd_train->add_option("--out", train.out_dir, "Output directory");
    cmd_train->add_option("--seed", train.seed, "Cross-validation fold shuffle seed");

    EvaluateArgs ev;
    auto* cmd_eval = app.add_subcommand(
        "evaluate", "Score detection records against a truth file");
    cmd_eval->add_option("records", ev.records_path, "Detection records (records.csv)")
        ->required();
    cmd_eval->add_option("--truth", ev.truth_path, "Truth file")->required();
    cmd_eval->add_option("--model", ev.model_path, "Model for (re)classifying candidates");
    cmd_eval->add_option("--out", ev.out_dir, "Output directory");
    cmd_eval->add_flag("--flip-y", ev.flip_y, "Truth y is a top-left row, not bottom-left");

    PhantomArgs ph;
    auto* cmd_ph = app.add_subcommand(
        "phantoms", "Generate synthetic test mammograms with a truth file");
    cmd_ph->add_option("--count", ph.count, "Number of phantoms")
        ->check(CLI::PositiveNumber);
    cmd_ph->add_option("--seed", ph.seed, "Generator seed");
    cmd_ph->add_option("--out", ph.out_dir, "Output directory");

    std::string conv_in, conv_out;
    auto* cmd_conv = app.add_subcommand("convert", "Convert between PGM and PNG");
    cmd_conv->add_option("input", conv_in, "Source image")->required();
    cmd_conv->add_option("output", conv_out, "Destination image (.pgm/.pnm/.png)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_detect->parsed()) return run_detect(det);
        if (cmd_train->parsed()) return run_train(train);
        if (cmd_eval->parsed()) return run_evaluate(ev);
        if (cmd_ph->parsed()) return run_phantoms(ph);
        if (cmd_conv->parsed()) return run_convert(conv_in, conv_out);
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
