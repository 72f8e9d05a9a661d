#include "certpri/prioritizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "certpri/error.hpp"
#include "certpri/io.hpp"

namespace certpri {

std::string_view to_string(Mode mode) { return mode == Mode::white_box ? "white-box" : "black-box"; }

Mode parse_mode(std::string_view text) {
    if (text == "white-box" || text == "white_box" || text == "white") return Mode::white_box;
    if (text == "black-box" || text == "black_box" || text == "black") return Mode::black_box;
    throw InputError("unknown mode '" + std::string(text) + "'");
}

Radius Radius::parse(std::string_view text) {
    Radius r;
    r.relative = !text.empty() && (text.back() == 'x' || text.back() == 'X');
    if (r.relative) text.remove_suffix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), r.value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !(r.value > 0.0) ||
        !std::isfinite(r.value))
        throw InputError("bad radius '" + std::string(text) + "' (expected e.g. 0.5 or 0.04x)");
    return r;
}

std::string Radius::to_string() const { return format_double(value) + (relative ? "x" : ""); }

double Radius::resolve(double data_scale) const {
    const double r = relative ? value * data_scale : value;
    if (!(r > 0.0) || !std::isfinite(r))
        throw InputError("resolved sampling radius is not positive (relative radius on all-zero data?)");
    return r;
}

void CertPriConfig::validate() const {
    if (batches < 3) throw InputError("batches (N_b) must be >= 3");
    if (samples_per_batch < 5) throw InputError("samples per batch (N_rsb) must be >= 5");
    if (!(radius.value > 0.0)) throw InputError("radius must be positive");
    if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw InputError("fd_step must be positive");
}

InputScale InputScale::of(const Dataset& data) { return {data.max_abs_feature(), data.column_scale()}; }

std::vector<double> estimate_gradient_blackbox(const ScalarHead& head, std::span<const double> x,
                                               std::span<const double> steps) {
    if (steps.size() != x.size()) throw InputError("one finite-difference step per coordinate is required");
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = steps[i];
        if (!(d > 0.0)) throw InputError("finite-difference step must be positive");
        probe[i] = x[i] + d;
        const double up = head.value(probe);
        probe[i] = x[i] - d;
        const double down = head.value(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * d);
        if (!std::isfinite(grad[i])) throw NumericError("non-finite finite-difference estimate", -1);
    }
    return grad;
}

std::vector<double> estimate_gradient_blackbox(const ScalarHead& head, std::span<const double> x, double step) {
    const std::vector<double> steps(x.size(), step);
    return estimate_gradient_blackbox(head, x, steps);
}

std::vector<double> gradient_norm_samples(const ScalarHead& head, std::span<const double> x0,
                                          const CertPriConfig& config, const InputScale& scale, Rng& rng) {
    config.validate();
    if (x0.size() != head.dim()) throw InputError("input dimension does not match the scalar head");
    const BallSpec ball{{x0.begin(), x0.end()}, config.radius.resolve(scale.max_abs), config.p};
    const Norm q = config.q();

    std::vector<double> steps;
    if (config.mode == Mode::black_box) {
        steps.assign(x0.size(), config.fd_step);
        if (!scale.feature.empty()) {
            if (scale.feature.size() != x0.size()) throw InputError("feature scale has wrong length");
            for (std::size_t i = 0; i < steps.size(); ++i) steps[i] *= scale.feature[i];
        }
    }

    std::vector<double> point(x0.size()), grad(x0.size());
    std::vector<double> maxima;
    maxima.reserve(config.batches);
    for (std::size_t j = 0; j < config.batches; ++j) {
        double batch_max = 0.0;
        for (std::size_t k = 0; k < config.samples_per_batch; ++k) {
            sample(ball, rng, point);
            if (config.mode == Mode::white_box)
                head.value_and_gradient(point, grad);
            else
                grad = estimate_gradient_blackbox(head, point, steps);
            batch_max = std::max(batch_max, norm(grad, q));
        }
        maxima.push_back(batch_max);
    }
    return maxima;
}

MovementCost movement_cost(const ScalarHead& head, std::span<const double> x0, const CertPriConfig& config,
                           const InputScale& scale, Rng& rng) {
    MovementCost cost;
    cost.h_value = head.value(x0);
    cost.block_maxima = gradient_norm_samples(head, x0, config, scale, rng);
    cost.fit = fit_reverse_weibull(cost.block_maxima);
    const LipschitzEstimate est = lipschitz_estimate(cost.fit, cost.block_maxima, config.endpoint);
    cost.lipschitz = est.value;
    cost.fallback = est.fallback;
    if (est.fallback && !cost.fit.message.empty())
        cost.warnings.push_back("weibull fit fallback to sample max: " + cost.fit.message);

    if (cost.h_value < 0.0) {
        // Generic heads may go negative; the certificate is then vacuous.
        cost.warnings.push_back("negative gap value; gamma_L clamped to 0");
        cost.gamma_L = 0.0;
    } else if (cost.h_value == 0.0) {
        cost.gamma_L = 0.0;
    } else if (cost.lipschitz > 0.0) {
        cost.gamma_L = cost.h_value / cost.lipschitz;
    } else {
        cost.warnings.push_back("zero gradient norm over the sampling ball; gamma_L is unbounded");
        cost.gamma_L = std::numeric_limits<double>::infinity();
    }
    return cost;
}

std::uint64_t input_seed(std::uint64_t base, std::size_t index) { return base ^ static_cast<std::uint64_t>(index); }

std::vector<std::size_t> ascending_order(std::span<const double> gamma) {
    std::vector<std::size_t> order(gamma.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gamma[a] < gamma[b]; });
    return order;
}

namespace {

InputResult evaluate_input(const Model& model, const FeatureMatrix& inputs, std::size_t i,
                           const CertPriConfig& config, const InputScale& scale) {
    const std::span<const double> x = inputs.row(i);
    InputResult result;
    result.index = i;
    const CenterGapHead head(model, x);
    Rng rng(input_seed(config.seed, i));
    result.cost = movement_cost(head, x, config, scale, rng);
    if (model.task() == Task::classification)
        result.prediction = {static_cast<double>(head.frozen_class())};
    else
        result.prediction = model.forward(x);
    return result;
}

PrioritizationResult prepare(const Model& model, const FeatureMatrix& inputs, const CertPriConfig& config,
                             const InputScale& scale) {
    config.validate();
    if (inputs.rows < 1) throw InputError("no inputs to prioritize");
    if (inputs.dim != model.input_dim())
        throw InputError("inputs have " + std::to_string(inputs.dim) + " features, model expects " +
                         std::to_string(model.input_dim()));
    if (inputs.values.size() != inputs.rows * inputs.dim) throw InputError("feature matrix has wrong size");
    PrioritizationResult result;
    result.task = model.task();
    result.config = config;
    result.radius = config.radius.resolve(scale.max_abs);
    result.inputs.resize(inputs.rows);
    return result;
}

void finish(PrioritizationResult& result) {
    std::vector<double> gamma(result.inputs.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = result.inputs[i].cost.gamma_L;
    result.omega = ascending_order(gamma);
}

}  // namespace

PrioritizationResult prioritize_serial(const Model& model, const FeatureMatrix& inputs,
                                       const CertPriConfig& config, const InputScale& scale) {
    PrioritizationResult result = prepare(model, inputs, config, scale);
    for (std::size_t i = 0; i < inputs.rows; ++i) result.inputs[i] = evaluate_input(model, inputs, i, config, scale);
    finish(result);
    return result;
}

PrioritizationResult prioritize(const Model& model, const FeatureMatrix& inputs, const CertPriConfig& config,
                                const InputScale& scale) {
    PrioritizationResult result = prepare(model, inputs, config, scale);
    const auto n = static_cast<std::ptrdiff_t>(inputs.rows);
    std::vector<std::exception_ptr> errors(inputs.rows);

#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            result.inputs[idx] = evaluate_input(model, inputs, idx, config, scale);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    finish(result);
    return result;
}

double soundness_probe(const ScalarHead& head, std::span<const double> x0, double gamma_L, Norm p,
                       std::size_t trials, Rng& rng) {
    if (trials < 1) throw InputError("soundness_probe needs at least one trial");
    if (!(gamma_L > 0.0) || !std::isfinite(gamma_L)) return 0.0;
    const BallSpec ball{{x0.begin(), x0.end()}, gamma_L, p};
    std::vector<double> point(x0.size());
    std::size_t violations = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        sample(ball, rng, point);
        if (head.value(point) <= 0.0) ++violations;
    }
    return static_cast<double>(violations) / static_cast<double>(trials);
}

double lipschitz_bound_violation(const ScalarHead& head, std::span<const double> x0, double gamma_L,
                                 double lipschitz, Norm p, std::size_t trials, Rng& rng) {
    if (trials < 1) throw InputError("lipschitz_bound_violation needs at least one trial");
    if (!(gamma_L > 0.0) || !std::isfinite(gamma_L)) return 0.0;
    const BallSpec ball{{x0.begin(), x0.end()}, gamma_L, p};
    const double h0 = head.value(x0);
    std::vector<double> point(x0.size()), mu(x0.size());
    std::size_t violations = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        sample(ball, rng, point);
        for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = point[i] - x0[i];
        const double drop = h0 - head.value(point);
        if (drop > lipschitz * norm(mu, p) * (1.0 + 1e-9) + 1e-15) ++violations;
    }
    return static_cast<double>(violations) / static_cast<double>(trials);
}

}  // namespace certpri
