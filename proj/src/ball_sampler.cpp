#include "certpri/ball_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "certpri/error.hpp"

namespace certpri {

Norm parse_norm(std::string_view text) {
    if (text == "1") return Norm::l1;
    if (text == "2") return Norm::l2;
    if (text == "inf" || text == "Inf" || text == "infinity") return Norm::linf;
    throw InputError("unsupported norm '" + std::string(text) + "' (expected 1, 2 or inf)");
}

std::string to_string(Norm p) {
    switch (p) {
        case Norm::l1: return "1";
        case Norm::l2: return "2";
        case Norm::linf: return "inf";
    }
    return "2";
}

Norm dual(Norm p) {
    switch (p) {
        case Norm::l1: return Norm::linf;
        case Norm::l2: return Norm::l2;
        case Norm::linf: return Norm::l1;
    }
    return Norm::l2;
}

double norm(std::span<const double> v, Norm p) {
    double acc = 0.0;
    switch (p) {
        case Norm::l1:
            for (double x : v) acc += std::abs(x);
            return acc;
        case Norm::l2: {
            // Scaled accumulation avoids overflow for large entries.
            double scale = 0.0;
            for (double x : v) scale = std::max(scale, std::abs(x));
            if (scale == 0.0 || !std::isfinite(scale)) return scale;
            for (double x : v) {
                const double r = x / scale;
                acc += r * r;
            }
            return scale * std::sqrt(acc);
        }
        case Norm::linf:
            for (double x : v) acc = std::max(acc, std::abs(x));
            return acc;
    }
    return acc;
}

void BallSpec::validate() const {
    if (center.empty()) throw InputError("ball center is empty");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("ball radius must be positive and finite");
}

void sample(const BallSpec& spec, Rng& rng, std::span<double> out) {
    spec.validate();
    const std::size_t d = spec.center.size();
    if (out.size() != d) throw InputError("sample buffer has wrong length");
    const double R = spec.radius;
    switch (spec.p) {
        case Norm::l2: {
            // Gaussian direction, radius R U^(1/d).
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                out[i] = rng.normal();
                sq += out[i] * out[i];
            }
            const double r = R * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
            const double k = r / std::sqrt(sq);
            for (std::size_t i = 0; i < d; ++i) out[i] = spec.center[i] + k * out[i];
            break;
        }
        case Norm::linf:
            for (std::size_t i = 0; i < d; ++i) out[i] = spec.center[i] + R * (2.0 * rng.uniform() - 1.0);
            break;
        case Norm::l1: {
            // d + 1 exponentials normalised give a uniform point of the simplex
            // interior (Dirichlet(1,...,1)); random signs fill the cross-polytope.
            double total = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                out[i] = rng.exponential();
                total += out[i];
            }
            total += rng.exponential();
            for (std::size_t i = 0; i < d; ++i) {
                const double s = (rng.next_u64() >> 63) ? -1.0 : 1.0;
                out[i] = spec.center[i] + s * R * out[i] / total;
            }
            break;
        }
    }
}

std::vector<double> sample(const BallSpec& spec, Rng& rng) {
    std::vector<double> out(spec.center.size());
    sample(spec, rng, out);
    return out;
}

std::vector<std::vector<double>> sample_batch(const BallSpec& spec, std::size_t count, Rng& rng) {
    if (count < 1) throw InputError("sample_batch requires count >= 1");
    spec.validate();
    std::vector<std::vector<double>> batch;
    batch.reserve(count);
    for (std::size_t i = 0; i < count; ++i) batch.push_back(sample(spec, rng));
    return batch;
}

}  // namespace certpri
