#include "certpri/centers.hpp"

#include <algorithm>
#include <cmath>

#include "certpri/error.hpp"

namespace certpri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(1 + tanh f) = ln 2 - softplus(-2 f), finite for every finite f.
double log_one_plus_tanh(double f) {
    const double y = -2.0 * f;
    const double softplus = std::max(y, 0.0) + std::log1p(std::exp(-std::abs(y)));
    return std::log(2.0) - softplus;
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Unchecked class-center gap on [0, 1]; writes dh/dp.
double class_gap(double p, double& dh_dp) {
    const double log_term = std::log1p(p);
    const double raw = p * (1.0 + log_term);
    if (raw >= 1.0) {
        dh_dp = -1.0;
        return 1.0 - p;
    }
    dh_dp = log_term + p / (1.0 + p);
    return raw - p;
}

struct RegressionTerm {
    double center;
    double d_center;  // d center / d f
};

RegressionTerm regression_term(double f, double lo, double hi) {
    const double log_term = log_one_plus_tanh(f);
    const double raw = f + std::abs(f) * log_term;
    if (raw <= lo) return {lo, 0.0};
    if (raw >= hi) return {hi, 0.0};
    const double d_raw = 1.0 + sign(f) * log_term + std::abs(f) * (1.0 - std::tanh(f));
    return {raw, d_raw};
}

void regression_bounds(const ModelSignature& sig, double& lo, double& hi) {
    lo = sig.output_min.value_or(-kInf);
    hi = sig.output_max.value_or(kInf);
}

}  // namespace

double class_center(double p_c) {
    if (!(p_c > 0.0 && p_c < 1.0)) throw InputError("class_center requires p in (0, 1)");
    return std::min(p_c * (1.0 + std::log1p(p_c)), 1.0);
}

double regression_center(double f, double min_r, double max_r) {
    if (!(min_r < max_r)) throw InputError("regression_center requires min_r < max_r");
    if (!std::isfinite(f)) throw InputError("regression_center requires a finite output");
    return regression_term(f, min_r, max_r).center;
}

OutputReduction center_gap_reduction(const ModelSignature& signature, std::size_t frozen_class) {
    if (signature.task == Task::classification) {
        if (frozen_class >= signature.output_dim) throw InputError("frozen class index out of range");
        return [frozen_class](std::span<const double> out, std::span<double> d_out) {
            std::fill(d_out.begin(), d_out.end(), 0.0);
            double dh = 0.0;
            const double h = class_gap(out[frozen_class], dh);
            d_out[frozen_class] = dh;
            return h;
        };
    }
    double lo = 0.0, hi = 0.0;
    regression_bounds(signature, lo, hi);
    return [lo, hi](std::span<const double> out, std::span<double> d_out) {
        const double inv = 1.0 / static_cast<double>(out.size());
        double h = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const RegressionTerm t = regression_term(out[i], lo, hi);
            const double gap = t.center - out[i];
            h += std::abs(gap);
            d_out[i] = inv * sign(gap) * (t.d_center - 1.0);
        }
        return h * inv;
    };
}

CenterGap center_gap(const Model& model, std::span<const double> x, std::size_t frozen_class) {
    const std::vector<double> out = model.forward(x);
    const ModelSignature& sig = model.signature();
    CenterGap result;
    if (sig.task == Task::classification) {
        if (frozen_class >= out.size()) throw InputError("frozen class index out of range");
        const double p = out[frozen_class];
        double unused = 0.0;
        result.h_value = class_gap(p, unused);
        result.center_value = {std::min(p * (1.0 + std::log1p(p)), 1.0)};
        return result;
    }
    double lo = 0.0, hi = 0.0;
    regression_bounds(sig, lo, hi);
    result.center_value.resize(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        result.center_value[i] = regression_term(out[i], lo, hi).center;
        result.h_value += std::abs(result.center_value[i] - out[i]);
    }
    result.h_value /= static_cast<double>(out.size());
    return result;
}

CenterGap center_gap(const Model& model, std::span<const double> x) {
    const std::size_t cls = model.task() == Task::classification ? model.predict_label(x) : 0;
    return center_gap(model, x, cls);
}

}  // namespace certpri
