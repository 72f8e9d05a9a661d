#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "certpri/ball_sampler.hpp"
#include "certpri/dataset.hpp"
#include "certpri/gevt.hpp"
#include "certpri/head.hpp"
#include "certpri/model.hpp"
#include "certpri/rng.hpp"

namespace certpri {

enum class Mode { white_box, black_box };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

// Sampling radius, either absolute or relative to the largest absolute
// feature value of the data ("0.04x").
struct Radius {
    double value = 0.04;
    bool relative = true;

    static Radius parse(std::string_view text);
    std::string to_string() const;
    double resolve(double data_scale) const;
};

struct CertPriConfig {
    Norm p = Norm::l2;
    Radius radius{};
    std::size_t batches = 6;             // N_b
    std::size_t samples_per_batch = 10;  // N_rsb
    Mode mode = Mode::white_box;
    double fd_step = 1e-4;  // black-box step, relative to each feature's scale
    std::uint64_t seed = 0;
    EndpointVariant endpoint = EndpointVariant::location_scale;

    Norm q() const { return dual(p); }
    void validate() const;
};

// Reference scales taken from the data being prioritized.
struct InputScale {
    double max_abs = 1.0;         // resolves relative radii
    std::vector<double> feature;  // per-feature scale for black-box steps; empty = all 1

    static InputScale of(const Dataset& data);
};

// Read-only view of a row-major feature matrix; carries no ground truth.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::span<const double> values;

    static FeatureMatrix of(const Dataset& data) { return {data.rows, data.dim, data.features}; }
    std::span<const double> row(std::size_t i) const { return values.subspan(i * dim, dim); }
};

struct MovementCost {
    double gamma_L = 0.0;
    double h_value = 0.0;
    double lipschitz = 0.0;
    std::vector<double> block_maxima;
    FitOutcome fit;
    bool fallback = false;
    std::vector<std::string> warnings;
};

struct InputResult {
    std::size_t index = 0;
    MovementCost cost;
    // Predicted label (classification) or output vector (regression) at the
    // unperturbed input; stored so evaluation does not need the model.
    std::vector<double> prediction;
};

struct PrioritizationResult {
    Task task = Task::classification;
    CertPriConfig config;
    double radius = 0.0;  // resolved absolute radius
    std::vector<InputResult> inputs;
    std::vector<std::size_t> omega;  // ascending gamma_L, ties by index
};

// Symmetric-difference gradient (h(x + d e_i) - h(x - d e_i)) / 2d per
// coordinate, with d = steps[i].
std::vector<double> estimate_gradient_blackbox(const ScalarHead& head, std::span<const double> x,
                                               std::span<const double> steps);
std::vector<double> estimate_gradient_blackbox(const ScalarHead& head, std::span<const double> x, double step);

// N_b block maxima, each the largest dual-norm gradient magnitude over
// N_rsb uniform draws from B_p(x0, R).
std::vector<double> gradient_norm_samples(const ScalarHead& head, std::span<const double> x0,
                                          const CertPriConfig& config, const InputScale& scale, Rng& rng);

MovementCost movement_cost(const ScalarHead& head, std::span<const double> x0, const CertPriConfig& config,
                           const InputScale& scale, Rng& rng);

// Per-input seed: base seed XOR input index.
std::uint64_t input_seed(std::uint64_t base, std::size_t index);

// Ranks inputs by ascending certified movement cost. The parallel version
// distributes inputs over OpenMP threads; the serial version is the
// reference it must match bit for bit.
PrioritizationResult prioritize(const Model& model, const FeatureMatrix& inputs, const CertPriConfig& config,
                                const InputScale& scale);
PrioritizationResult prioritize_serial(const Model& model, const FeatureMatrix& inputs,
                                       const CertPriConfig& config, const InputScale& scale);

// Stable ascending order of gamma values.
std::vector<std::size_t> ascending_order(std::span<const double> gamma);

// Fraction of `trials` uniform perturbations mu with ||mu||_p <= gamma_L
// for which h(x0 + mu) <= 0, i.e. the target position was reached inside
// the certified radius.
double soundness_probe(const ScalarHead& head, std::span<const double> x0, double gamma_L, Norm p,
                       std::size_t trials, Rng& rng);

// Fraction of the same kind of draws for which the local Lipschitz bound
// h(x0) - h(x0 + mu) <= lipschitz * ||mu||_p fails.
double lipschitz_bound_violation(const ScalarHead& head, std::span<const double> x0, double gamma_L,
                                 double lipschitz, Norm p, std::size_t trials, Rng& rng);

}  // namespace certpri
