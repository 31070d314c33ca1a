#pragma once

namespace mammo {

struct EvalMetrics {
    double sensitivity = 0.0;
    double specificity = 0.0;
    double harmonic_mean = 0.0;
    // False when the corresponding denominator was zero (no positives /
    // no negatives in the evaluated set); the rate is then meaningless.
    bool sensitivity_defined = true;
    bool specificity_defined = true;
};

/// 2ab/(a+b) with the 0/0 case defined as 0.
inline double harmonic_mean(double sens, double spec) {
    const double s = sens + spec;
    return s <= 0.0 ? 0.0 : 2.0 * sens * spec / s;
}

}  // namespace mammo
