#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "certpri/head.hpp"
#include "certpri/model.hpp"
#include "certpri/rng.hpp"

namespace testutil {

inline certpri::Model random_mlp(std::size_t d_in, std::vector<std::size_t> hidden, std::size_t d_out,
                                 certpri::Activation act, certpri::Task task, certpri::Rng& rng, double scale = 1.0) {
    std::vector<std::size_t> dims{d_in};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(d_out);
    std::vector<certpri::Layer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        certpri::Layer L;
        L.in_dim = dims[l];
        L.out_dim = dims[l + 1];
        L.activation = l + 2 == dims.size() ? certpri::Activation::identity : act;
        const double s = scale / std::sqrt(static_cast<double>(L.in_dim));
        for (std::size_t i = 0; i < L.in_dim * L.out_dim; ++i) L.weights.push_back(s * rng.normal());
        for (std::size_t i = 0; i < L.out_dim; ++i) L.bias.push_back(0.3 * rng.normal());
        layers.push_back(std::move(L));
    }
    certpri::ModelSignature sig;
    sig.input_dim = d_in;
    sig.output_dim = d_out;
    sig.task = task;
    return certpri::Model(sig, std::move(layers));
}

template <class F>
std::vector<double> central_diff(F&& f, std::span<const double> x, double rel_step = 1e-5) {
    std::vector<double> g(x.size()), xp(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(1.0, std::abs(x[i]));
        const double orig = xp[i];
        xp[i] = orig + h;
        const double up = f(std::span<const double>(xp));
        xp[i] = orig - h;
        const double down = f(std::span<const double>(xp));
        xp[i] = orig;
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

inline double rel_error(std::span<const double> a, std::span<const double> b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-8);
}

// Quadratic head h(x) = |x|^2 / 2.
class QuadraticHead final : public certpri::ScalarHead {
public:
    explicit QuadraticHead(std::size_t d) : d_(d) {}
    std::size_t dim() const override { return d_; }
    double value(std::span<const double> x) const override {
        double s = 0;
        for (double v : x) s += v * v;
        return 0.5 * s;
    }
    double value_and_gradient(std::span<const double> x, std::span<double> g) const override {
        std::copy(x.begin(), x.end(), g.begin());
        return value(x);
    }

private:
    std::size_t d_;
};

}  // namespace testutil
