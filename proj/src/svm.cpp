#include "mammo/svm.hpp"

#include "mammo/rng.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mammo {

double rbf_kernel(const Vector5d& x, const Vector5d& y, const KernelParams& p) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * p.sigma * p.sigma));
}

namespace {

constexpr double kKktTol = 1e-3;

struct Smo {
    const std::vector<Vector5d>& x;
    const std::vector<int>& y;
    const double C;
    Eigen::MatrixXd K;
    std::vector<double> alpha;
    std::vector<double> err;  // f(x_i) - y_i, maintained incrementally
    double b = 0.0;
    TrainDiagnostics* diag;

    Smo(const std::vector<Vector5d>& xs, const std::vector<int>& ys, const KernelParams& p,
        TrainDiagnostics* d)
        : x(xs), y(ys), C(p.C), diag(d) {
        const int n = static_cast<int>(x.size());
        K.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) K(i, j) = K(j, i) = rbf_kernel(x[i], x[j], p);
        alpha.assign(n, 0.0);
        err.resize(n);
        for (int i = 0; i < n; ++i) err[i] = -y[i];
    }

    int n() const { return static_cast<int>(x.size()); }
    bool non_bound(int i) const { return alpha[i] > 0.0 && alpha[i] < C; }

    bool violates(int i) const {
        const double r = err[i] * y[i];
        return (r < -kKktTol && alpha[i] < C) || (r > kKktTol && alpha[i] > 0.0);
    }

    double dual_objective() const {
        Eigen::VectorXd q(n());
        double sum = 0.0;
        for (int i = 0; i < n(); ++i) {
            q[i] = alpha[i] * y[i];
            sum += alpha[i];
        }
        return sum - 0.5 * q.dot(K * q);
    }

    bool take_step(int i, int j) {
        if (i == j) return false;
        const double ai = alpha[i], aj = alpha[j];
        const int s = y[i] * y[j];
        double L, H;
        if (s < 0) {
            L = std::max(0.0, aj - ai);
            H = std::min(C, C + aj - ai);
        } else {
            L = std::max(0.0, ai + aj - C);
            H = std::min(C, ai + aj);
        }
        if (L >= H) return false;
        const double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        if (eta <= 0.0) return false;
        double aj_new = aj + y[j] * (err[i] - err[j]) / eta;
        aj_new = std::clamp(aj_new, L, H);
        // Snap to an attainable bound so bound tests compare exactly; the
        // paired update below keeps sum(alpha_i y_i) = 0 exact regardless.
        if (L == 0.0 && aj_new < 1e-10 * C) aj_new = 0.0;
        if (H == C && aj_new > C - 1e-10 * C) aj_new = C;
        if (std::abs(aj_new - aj) < 1e-12 * (aj_new + aj + 1e-12)) return false;
        double ai_new = ai + s * (aj - aj_new);
        if (ai_new < 1e-14 * C) ai_new = 0.0;
        if (ai_new > C - 1e-14 * C && ai_new < C + 1e-14 * C) ai_new = C;
        const double di = ai_new - ai, dj = aj_new - aj;
        const double b1 = b - err[i] - y[i] * di * K(i, i) - y[j] * dj * K(i, j);
        const double b2 = b - err[j] - y[i] * di * K(i, j) - y[j] * dj * K(j, j);
        double b_new;
        if (ai_new > 0.0 && ai_new < C)
            b_new = b1;
        else if (aj_new > 0.0 && aj_new < C)
            b_new = b2;
        else
            b_new = (b1 + b2) / 2.0;
        for (int k = 0; k < n(); ++k)
            err[k] += y[i] * di * K(i, k) + y[j] * dj * K(j, k) + (b_new - b);
        alpha[i] = ai_new;
        alpha[j] = aj_new;
        b = b_new;
        if (diag) diag->dual_values.push_back(dual_objective());
        return true;
    }

    bool examine(int i) {
        if (!violates(i)) return false;
        // Second choice: non-bound partner maximizing |E_i - E_j|.
        int best = -1;
        double best_gap = -1.0;
        for (int j = 0; j < n(); ++j) {
            if (j == i || !non_bound(j)) continue;
            const double gap = std::abs(err[i] - err[j]);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best >= 0 && take_step(i, best)) return true;
        for (int j = 0; j < n(); ++j)
            if (j != i && non_bound(j) && j != best && take_step(i, j)) return true;
        for (int j = 0; j < n(); ++j)
            if (j != i && !non_bound(j) && take_step(i, j)) return true;
        return false;
    }

    void refresh_errors() {
        for (int k = 0; k < n(); ++k) {
            double f = b;
            for (int l = 0; l < n(); ++l)
                if (alpha[l] > 0.0) f += alpha[l] * y[l] * K(l, k);
            err[k] = f - y[k];
        }
    }

    bool solve(int max_sweeps, int* sweeps_used) {
        bool examine_all = true;
        int sweeps = 0, stall = 0;
        bool converged = false;
        while (sweeps < max_sweeps) {
            ++sweeps;
            int changed = 0;
            for (int i = 0; i < n(); ++i)
                if (examine_all || non_bound(i)) changed += examine(i) ? 1 : 0;
            if (examine_all) {
                if (changed == 0) {
                    // Incremental errors drift; re-derive before declaring done.
                    refresh_errors();
                    bool dirty = false;
                    for (int i = 0; i < n() && !dirty; ++i) dirty = violates(i);
                    if (!dirty) {
                        converged = true;
                        break;
                    }
                    if (++stall >= 2) break;
                } else {
                    stall = 0;
                    examine_all = false;
                }
            } else if (changed == 0) {
                examine_all = true;
            }
        }
        *sweeps_used = sweeps;
        return converged;
    }
};

}  // namespace

SvmModel train_svm(const std::vector<Sample>& data, const KernelParams& p,
                   TrainDiagnostics* diag) {
    const int n = static_cast<int>(data.size());
    int pos = 0, neg = 0;
    for (const Sample& s : data) (s.label > 0 ? pos : neg) += 1;
    if (pos == 0 || neg == 0)
        throw SingleClass("training data must contain both classes");

    SvmModel model;
    model.params = p;
    Vector5d mean = Vector5d::Zero(), var = Vector5d::Zero();
    for (const Sample& s : data) mean += s.features;
    mean /= n;
    for (const Sample& s : data) var += (s.features - mean).cwiseAbs2();
    var /= n;
    Vector5d scale = var.cwiseSqrt();
    for (int d = 0; d < 5; ++d)
        if (scale[d] < 1e-12) scale[d] = 1.0;
    model.feature_mean = mean;
    model.feature_scale = scale;

    std::vector<Vector5d> xs(static_cast<std::size_t>(n));
    std::vector<int> ys(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = (data[static_cast<std::size_t>(i)].features - mean).cwiseQuotient(scale);
        ys[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(i)].label;
    }

    Smo smo(xs, ys, p, diag);
    int sweeps = 0;
    model.converged = smo.solve(10 * n, &sweeps);
    if (diag) {
        diag->passes = sweeps;
        diag->converged = model.converged;
    }
    model.bias = smo.b;
    for (int i = 0; i < n; ++i) {
        if (smo.alpha[static_cast<std::size_t>(i)] <= 0.0) continue;
        model.alpha.push_back(smo.alpha[static_cast<std::size_t>(i)]);
        model.sv_labels.push_back(ys[static_cast<std::size_t>(i)]);
        model.sv_features.push_back(xs[static_cast<std::size_t>(i)]);
    }
    return model;
}

double decision_value(const SvmModel& m, const Vector5d& x) {
    const Vector5d z = (x - m.feature_mean).cwiseQuotient(m.feature_scale);
    double f = m.bias;
    for (std::size_t i = 0; i < m.alpha.size(); ++i)
        f += m.alpha[i] * m.sv_labels[i] * rbf_kernel(m.sv_features[i], z, m.params);
    return f;
}

std::vector<int> stratified_folds(const std::vector<Sample>& data, int k, std::uint64_t seed) {
    std::vector<int> fold_of(data.size(), 0);
    Rng rng(seed);
    for (int cls : {+1, -1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data[i].label == cls) idx.push_back(i);
        rng.shuffle(idx);
        for (std::size_t q = 0; q < idx.size(); ++q)
            fold_of[idx[q]] = static_cast<int>(q % static_cast<std::size_t>(k));
    }
    return fold_of;
}

std::vector<EvalMetrics> fold_metrics(const std::vector<Sample>& data,
                                      const std::vector<int>& fold_of, int fold_count,
                                      const KernelParams& p) {
    std::vector<EvalMetrics> per_fold;
    per_fold.reserve(static_cast<std::size_t>(fold_count));
    for (int f = 0; f < fold_count; ++f) {
        std::vector<Sample> train;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (fold_of[i] != f) train.push_back(data[i]);
        const SvmModel model = train_svm(train, p);
        std::int64_t tp = 0, fn = 0, tn = 0, fp = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (fold_of[i] != f) continue;
            const int pred = decision_value(model, data[i].features) > 0.0 ? +1 : -1;
            if (data[i].label > 0)
                (pred > 0 ? tp : fn) += 1;
            else
                (pred < 0 ? tn : fp) += 1;
        }
        EvalMetrics m;
        m.sensitivity = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
        m.specificity = tn + fp > 0 ? double(tn) / double(tn + fp) : 0.0;
        m.harmonic_mean = harmonic_mean(m.sensitivity, m.specificity);
        per_fold.push_back(m);
    }
    return per_fold;
}

EvalMetrics cross_validate(const std::vector<Sample>& data, const std::vector<int>& fold_of,
                           int fold_count, const KernelParams& p) {
    EvalMetrics mean;
    for (const EvalMetrics& m : fold_metrics(data, fold_of, fold_count, p)) {
        mean.sensitivity += m.sensitivity;
        mean.specificity += m.specificity;
        mean.harmonic_mean += m.harmonic_mean;
    }
    mean.sensitivity /= fold_count;
    mean.specificity /= fold_count;
    mean.harmonic_mean /= fold_count;
    return mean;
}

GridSearchResult grid_search(const std::vector<Sample>& data, std::uint64_t seed) {
    int pos = 0, neg = 0;
    for (const Sample& s : data) (s.label > 0 ? pos : neg) += 1;
    if (pos < 2 || neg < 2)
        throw InsufficientData("grid search needs at least two samples of each class");
    GridSearchResult res;
    res.seed = seed;
    res.fold_count = std::min(10, std::min(pos, neg));
    res.fold_of = stratified_folds(data, res.fold_count, seed);
    double best_hm = -1.0;
    for (int ci = 0; ci < 7; ++ci) {
        for (int si = 0; si < 7; ++si) {
            KernelParams p{std::pow(10.0, ci - 3), std::pow(10.0, si - 3)};
            const EvalMetrics m = cross_validate(data, res.fold_of, res.fold_count, p);
            res.mean_hm(ci, si) = m.harmonic_mean;
            if (m.harmonic_mean > best_hm) {
                best_hm = m.harmonic_mean;
                res.best = p;
                res.metrics = m;
            }
        }
    }
    return res;
}

void save_model(std::ostream& os, const SvmModel& m) {
    os << "mammoseg-svm-v1\n";
    os << std::setprecision(17);
    os << "C " << m.params.C << "\n";
    os << "sigma " << m.params.sigma << "\n";
    os << "bias " << m.bias << "\n";
    os << "converged " << (m.converged ? 1 : 0) << "\n";
    os << "mean";
    for (int d = 0; d < 5; ++d) os << " " << m.feature_mean[d];
    os << "\nscale";
    for (int d = 0; d < 5; ++d) os << " " << m.feature_scale[d];
    os << "\nsv_count " << m.alpha.size() << "\n";
    for (std::size_t i = 0; i < m.alpha.size(); ++i) {
        os << m.alpha[i] << " " << m.sv_labels[i];
        for (int d = 0; d < 5; ++d) os << " " << m.sv_features[i][d];
        os << "\n";
    }
}

void save_model(const std::string& path, const SvmModel& m) {
    std::ofstream os(path);
    if (!os) throw CorruptFile("cannot open model file for writing: " + path);
    save_model(os, m);
    if (!os) throw CorruptFile("failed writing model file: " + path);
}

namespace {

std::string expect_key(std::istream& is, const std::string& key) {
    std::string k;
    if (!(is >> k) || k != key)
        throw CorruptFile("model file: expected field '" + key + "'");
    return k;
}

}  // namespace

SvmModel load_model(std::istream& is) {
    std::string tag;
    if (!std::getline(is, tag)) throw CorruptFile("model file: empty");
    if (!tag.empty() && tag.back() == '\r') tag.pop_back();
    if (tag != "mammoseg-svm-v1")
        throw UnsupportedFormat("model file: unknown format tag '" + tag + "'");
    SvmModel m;
    expect_key(is, "C");
    if (!(is >> m.params.C)) throw CorruptFile("model file: bad C");
    expect_key(is, "sigma");
    if (!(is >> m.params.sigma)) throw CorruptFile("model file: bad sigma");
    expect_key(is, "bias");
    if (!(is >> m.bias)) throw CorruptFile("model file: bad bias");
    expect_key(is, "converged");
    int conv = 1;
    if (!(is >> conv)) throw CorruptFile("model file: bad converged flag");
    m.converged = conv != 0;
    expect_key(is, "mean");
    for (int d = 0; d < 5; ++d)
        if (!(is >> m.feature_mean[d])) throw CorruptFile("model file: bad mean");
    expect_key(is, "scale");
    for (int d = 0; d < 5; ++d)
        if (!(is >> m.feature_scale[d])) throw CorruptFile("model file: bad scale");
    expect_key(is, "sv_count");
    std::size_t count = 0;
    if (!(is >> count)) throw CorruptFile("model file: bad sv_count");
    if (m.params.C <= 0.0 || m.params.sigma <= 0.0)
        throw CorruptFile("model file: non-positive kernel parameters");
    m.alpha.resize(count);
    m.sv_labels.resize(count);
    m.sv_features.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!(is >> m.alpha[i] >> m.sv_labels[i]))
            throw CorruptFile("model file: truncated support vector");
        for (int d = 0; d < 5; ++d)
            if (!(is >> m.sv_features[i][d]))
                throw CorruptFile("model file: truncated support vector");
        if (m.alpha[i] <= 0.0 || (m.sv_labels[i] != 1 && m.sv_labels[i] != -1))
            throw CorruptFile("model file: invalid support vector");
    }
    return m;
}

SvmModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CorruptFile("cannot open model file: " + path);
    return load_model(is);
}

}  // namespace mammo
