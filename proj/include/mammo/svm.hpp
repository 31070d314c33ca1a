#pragma once

#include "mammo/core.hpp"
#include "mammo/metrics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mammo {

using Vector5d = Eigen::Matrix<double, 5, 1>;

struct Sample {
    Vector5d features;
    int label = 0;  // +1 mass, -1 normal
};

struct KernelParams {
    double C = 1.0;
    double sigma = 1.0;
};

/// K = exp(-|x-y|^2 / (2 sigma^2)).
double rbf_kernel(const Vector5d& x, const Vector5d& y, const KernelParams& p);

struct SvmModel {
    KernelParams params;
    double bias = 0.0;
    std::vector<double> alpha;        // multipliers, all > 0
    std::vector<int> sv_labels;       // +1/-1
    std::vector<Vector5d> sv_features;  // standardized
    Vector5d feature_mean = Vector5d::Zero();
    Vector5d feature_scale = Vector5d::Ones();
    bool converged = true;
};

struct TrainDiagnostics {
    std::vector<double> dual_values;  // dual objective after every update
    int passes = 0;
    bool converged = true;
};

/// SMO on the dual problem, KKT tolerance 1e-3, budget 10n sweeps.
/// Features are z-scored on the training set (per-dimension population SD;
/// scale 1 when SD < 1e-12) and the transform is stored in the model.
/// Deterministic: candidate pairs are scanned in index order, the partner
/// maximizing |E_i - E_j| wins with lowest-index tie-break. Exhausting the
/// budget clears model.converged instead of failing.
/// When diag is given, the exact dual objective is recorded after every
/// multiplier update (costs O(n^2) per step, test use only).
SvmModel train_svm(const std::vector<Sample>& data, const KernelParams& p,
                   TrainDiagnostics* diag = nullptr);

/// Sum alpha_i y_i K(s_i, x) + b, with x standardized by the model's stored
/// transform; classification is the sign.
double decision_value(const SvmModel& m, const Vector5d& x);

struct GridSearchResult {
    KernelParams best;
    EvalMetrics metrics;  // fold-mean rates of the winning cell
    Eigen::Matrix<double, 7, 7> mean_hm;  // [C exponent -3..3][sigma exponent -3..3]
    std::vector<int> fold_of;             // fold index per input sample
    int fold_count = 0;
    std::uint64_t seed = 0;
};

/// Stratified fold assignment: per class, indices are shuffled with the
/// seeded generator and dealt round-robin into k folds.
std::vector<int> stratified_folds(const std::vector<Sample>& data, int k, std::uint64_t seed);

/// Held-out sensitivity/specificity/HM of each fold for one (C, sigma).
std::vector<EvalMetrics> fold_metrics(const std::vector<Sample>& data,
                                      const std::vector<int>& fold_of, int fold_count,
                                      const KernelParams& p);

/// Mean sensitivity/specificity/HM across held-out folds for one (C, sigma).
EvalMetrics cross_validate(const std::vector<Sample>& data, const std::vector<int>& fold_of,
                           int fold_count, const KernelParams& p);

/// Exhaustive 7x7 decade grid C, sigma in {1e-3..1e3}, stratified k-fold CV
/// with k = min(10, smaller class count), maximizing mean HM; ties prefer
/// smaller C, then smaller sigma.
GridSearchResult grid_search(const std::vector<Sample>& data, std::uint64_t seed = 0);

void save_model(std::ostream& os, const SvmModel& m);
void save_model(const std::string& path, const SvmModel& m);
SvmModel load_model(std::istream& is);
SvmModel load_model(const std::string& path);

}  // namespace mammo
