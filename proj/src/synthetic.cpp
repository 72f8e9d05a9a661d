#include "certpri/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "certpri/error.hpp"
#include "certpri/rng.hpp"

namespace certpri {

namespace {

constexpr double kTruncation = 2.5;

std::vector<std::vector<double>> blob_centers(const SyntheticSpec& spec) {
    std::vector<std::vector<double>> centers(spec.classes, std::vector<double>(spec.input_dim, 0.0));
    if (spec.input_dim == 1) {
        for (std::size_t k = 0; k < spec.classes; ++k) centers[k][0] = spec.separation * static_cast<double>(k);
        return centers;
    }
    // Regular polygon in the first two coordinates with neighbouring centers
    // `separation` apart.
    const double K = static_cast<double>(spec.classes);
    const double radius = spec.separation / (2.0 * std::sin(std::numbers::pi / K));
    for (std::size_t k = 0; k < spec.classes; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / K;
        centers[k][0] = radius * std::cos(angle);
        centers[k][1] = radius * std::sin(angle);
    }
    return centers;
}

void blob_point(const SyntheticSpec& spec, const std::vector<double>& center, Rng& rng, double* out) {
    const std::size_t planar = std::min<std::size_t>(spec.input_dim, 2);
    for (;;) {
        double sq = 0.0;
        for (std::size_t i = 0; i < planar; ++i) {
            out[i] = rng.normal();
            sq += out[i] * out[i];
        }
        if (sq <= kTruncation * kTruncation) break;
    }
    for (std::size_t i = planar; i < spec.input_dim; ++i) out[i] = rng.normal();
    for (std::size_t i = 0; i < spec.input_dim; ++i) out[i] = center[i] + spec.spread * out[i];
}

std::size_t nearest_center(const std::vector<std::vector<double>>& centers, const double* x, std::size_t d) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += (x[i] - centers[k][i]) * (x[i] - centers[k][i]);
        if (s < best_d) {
            best_d = s;
            best = k;
        }
    }
    return best;
}

int other_label(int label, std::size_t classes, Rng& rng) {
    const auto shift = 1 + static_cast<int>(rng.below(classes - 1));
    return (label + shift) % static_cast<int>(classes);
}

Dataset make_classification(std::size_t rows, std::size_t dim) {
    Dataset d;
    d.rows = rows;
    d.dim = dim;
    d.features.resize(rows * dim);
    d.labels.resize(rows);
    return d;
}

void corrupt_labels(Dataset& train, std::size_t classes, double rate, Rng& rng, std::vector<std::size_t>& corrupted) {
    for (std::size_t i = 0; i < train.rows; ++i) {
        if (rng.uniform() < rate) {
            train.labels[i] = other_label(train.labels[i], classes, rng);
            corrupted.push_back(i);
        }
    }
}

SyntheticData blobs(const SyntheticSpec& spec, Rng& rng) {
    SyntheticData out;
    out.centers = blob_centers(spec);
    const std::size_t d = spec.input_dim;
    auto fill = [&](std::size_t rows) {
        Dataset data = make_classification(rows, d);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto k = static_cast<std::size_t>(rng.below(spec.classes));
            blob_point(spec, out.centers[k], rng, data.features.data() + r * d);
            data.labels[r] = static_cast<int>(k);
        }
        return data;
    };
    out.train = fill(spec.train_count);
    out.test = fill(spec.test_count);

    if (spec.off_manifold > 0.0) {
        double extent = 0.0;
        for (const auto& c : out.centers)
            for (double v : c) extent = std::max(extent, std::abs(v));
        extent += kTruncation * spec.spread + spec.separation;
        for (std::size_t r = 0; r < out.test.rows; ++r) {
            if (rng.uniform() >= spec.off_manifold) continue;
            double* x = out.test.features.data() + r * d;
            for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(-extent, extent);
            out.test.labels[r] = static_cast<int>(nearest_center(out.centers, x, d));
        }
    }
    corrupt_labels(out.train, spec.classes, spec.label_noise, rng, out.corrupted_train);
    return out;
}

SyntheticData moons(const SyntheticSpec& spec, Rng& rng) {
    SyntheticData out;
    const std::size_t d = spec.input_dim;
    auto fill = [&](std::size_t rows) {
        Dataset data = make_classification(rows, d);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto k = static_cast<int>(rng.below(2));
            const double theta = std::numbers::pi * rng.uniform();
            double* x = data.features.data() + r * d;
            const double mx = k == 0 ? std::cos(theta) : 1.0 - std::cos(theta);
            const double my = k == 0 ? std::sin(theta) : 0.5 - std::sin(theta);
            x[0] = mx + spec.moon_noise * rng.normal();
            if (d > 1) x[1] = my + spec.moon_noise * rng.normal();
            for (std::size_t i = 2; i < d; ++i) x[i] = spec.moon_noise * rng.normal();
            data.labels[r] = k;
        }
        return data;
    };
    out.train = fill(spec.train_count);
    out.test = fill(spec.test_count);
    corrupt_labels(out.train, 2, spec.label_noise, rng, out.corrupted_train);
    return out;
}

SyntheticData linear_regression(const SyntheticSpec& spec, Rng& rng) {
    SyntheticData out;
    const std::size_t d = spec.input_dim, d2 = spec.output_dim;
    out.weights.resize(d2 * d);
    for (double& w : out.weights) w = rng.normal();
    auto fill = [&](std::size_t rows) {
        Dataset data;
        data.rows = rows;
        data.dim = d;
        data.target_dim = d2;
        data.features.resize(rows * d);
        data.targets.resize(rows * d2);
        for (std::size_t r = 0; r < rows; ++r) {
            double* x = data.features.data() + r * d;
            for (std::size_t i = 0; i < d; ++i) x[i] = rng.uniform(-1.0, 1.0);
            for (std::size_t o = 0; o < d2; ++o) {
                double t = 0.0;
                for (std::size_t i = 0; i < d; ++i) t += out.weights[o * d + i] * x[i];
                data.targets[r * d2 + o] = t + spec.target_noise * rng.normal();
            }
        }
        return data;
    };
    out.train = fill(spec.train_count);
    out.test = fill(spec.test_count);
    // Corruption: a large additive error, three times the noiseless target
    // scale (E|w.x|^2 = |w|^2 / 3 for x uniform on [-1, 1]^d).
    const double scale = std::sqrt(static_cast<double>(d) / 3.0);
    for (std::size_t r = 0; r < out.train.rows; ++r) {
        if (rng.uniform() >= spec.label_noise) continue;
        for (std::size_t o = 0; o < d2; ++o) out.train.targets[r * d2 + o] += 3.0 * scale * rng.normal();
        out.corrupted_train.push_back(r);
    }
    return out;
}

}  // namespace

std::string_view to_string(Generator g) {
    switch (g) {
        case Generator::gaussian_blobs: return "gaussian_blobs";
        case Generator::two_moons: return "two_moons";
        case Generator::linear_regression_noise: return "linear_regression_noise";
    }
    return "gaussian_blobs";
}

Generator parse_generator(std::string_view text) {
    if (text == "gaussian_blobs" || text == "blobs") return Generator::gaussian_blobs;
    if (text == "two_moons" || text == "moons") return Generator::two_moons;
    if (text == "linear_regression_noise" || text == "linear") return Generator::linear_regression_noise;
    throw InputError("unknown generator '" + std::string(text) + "'");
}

void SyntheticSpec::validate() const {
    if (input_dim < 1) throw InputError("input_dim must be >= 1");
    if (train_count < 1 || test_count < 1) throw InputError("sample counts must be >= 1");
    if (!(label_noise >= 0.0 && label_noise <= 0.5)) throw InputError("label noise must lie in [0, 0.5]");
    if (!(off_manifold >= 0.0 && off_manifold <= 1.0)) throw InputError("off-manifold fraction must lie in [0, 1]");
    if (generator == Generator::gaussian_blobs) {
        if (classes < 2) throw InputError("blobs need at least 2 classes");
        if (!(spread > 0.0) || !(separation > 0.0)) throw InputError("spread and separation must be positive");
    }
    if (generator == Generator::two_moons && !(moon_noise >= 0.0)) throw InputError("moon noise must be >= 0");
    if (generator == Generator::linear_regression_noise) {
        if (output_dim < 1) throw InputError("output_dim must be >= 1");
        if (!(target_noise >= 0.0)) throw InputError("target noise must be >= 0");
    }
}

SyntheticData gen_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    switch (spec.generator) {
        case Generator::gaussian_blobs: return blobs(spec, rng);
        case Generator::two_moons: return moons(spec, rng);
        case Generator::linear_regression_noise: return linear_regression(spec, rng);
    }
    throw InvariantError("unhandled generator");
}

}  // namespace certpri
