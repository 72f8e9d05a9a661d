#include "certpri/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "certpri/error.hpp"
#include "certpri/rng.hpp"

namespace certpri {

namespace {

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

struct LayerGrad {
    std::vector<double> w, b;
};

ModelSignature signature_for(const Dataset& train, const TrainOptions& options) {
    ModelSignature sig;
    sig.input_dim = train.dim;
    if (train.has_labels()) {
        sig.task = Task::classification;
        const int top = *std::max_element(train.labels.begin(), train.labels.end());
        sig.output_dim = options.num_classes.value_or(std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1));
        if (static_cast<std::size_t>(top) >= sig.output_dim) throw InputError("label exceeds num_classes");
    } else if (train.has_targets()) {
        sig.task = Task::regression;
        sig.output_dim = train.target_dim;
        const auto [lo, hi] = std::minmax_element(train.targets.begin(), train.targets.end());
        const double pad = std::max(0.1 * (*hi - *lo), 1e-6);
        sig.output_min = *lo - pad;
        sig.output_max = *hi + pad;
    } else {
        throw InputError("training data has neither labels nor targets");
    }
    return sig;
}

}  // namespace

Model init_model(const ModelSignature& signature, const Architecture& arch, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> dims{signature.input_dim};
    dims.insert(dims.end(), arch.hidden.begin(), arch.hidden.end());
    dims.push_back(signature.output_dim);
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in_dim = dims[l];
        layer.out_dim = dims[l + 1];
        if (layer.out_dim == 0) throw InputError("hidden layer width must be >= 1");
        layer.activation = (l + 2 == dims.size()) ? Activation::identity : arch.activation;
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
        layer.weights.resize(layer.in_dim * layer.out_dim);
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
        layer.bias.assign(layer.out_dim, 0.0);
        layers.push_back(std::move(layer));
    }
    return Model(signature, std::move(layers));
}

Model train_toy(const Dataset& train, const Architecture& arch, const TrainOptions& options, TrainReport* report,
                const Dataset* test) {
    train.validate();
    if (options.batch_size < 1) throw InputError("batch size must be >= 1");
    if (!(options.learning_rate > 0.0)) throw InputError("learning rate must be positive");
    const ModelSignature sig = signature_for(train, options);
    const bool classify = sig.task == Task::classification;
    std::vector<Layer> layers = init_model(sig, arch, options.seed).layers();

    std::vector<AdamState> adam_w, adam_b;
    std::vector<LayerGrad> grads(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        adam_w.emplace_back(layers[l].weights.size());
        adam_b.emplace_back(layers[l].bias.size());
        grads[l].w.assign(layers[l].weights.size(), 0.0);
        grads[l].b.assign(layers[l].bias.size(), 0.0);
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t step = 0;

    Rng shuffle_rng(options.seed ^ 0x5DEECE66DULL);
    std::vector<std::size_t> order(train.rows);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<std::vector<double>> pre(layers.size()), act(layers.size() + 1);
    double epoch_loss = 0.0;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
        epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            for (auto& g : grads) {
                std::fill(g.w.begin(), g.w.end(), 0.0);
                std::fill(g.b.begin(), g.b.end(), 0.0);
            }
            for (std::size_t s = start; s < end; ++s) {
                const std::size_t idx = order[s];
                const auto x = train.row(idx);
                act[0].assign(x.begin(), x.end());
                for (std::size_t l = 0; l < layers.size(); ++l) {
                    const Layer& L = layers[l];
                    pre[l].assign(L.out_dim, 0.0);
                    act[l + 1].assign(L.out_dim, 0.0);
                    for (std::size_t r = 0; r < L.out_dim; ++r) {
                        double acc = L.bias[r];
                        for (std::size_t c = 0; c < L.in_dim; ++c) acc += L.weight(r, c) * act[l][c];
                        pre[l][r] = acc;
                        act[l + 1][r] = activate(L.activation, acc);
                    }
                }
                std::vector<double> delta(sig.output_dim);
                if (classify) {
                    const std::vector<double> p = softmax(act.back());
                    const auto y = static_cast<std::size_t>(train.labels[idx]);
                    epoch_loss -= std::log(std::max(p[y], 1e-300));
                    for (std::size_t k = 0; k < p.size(); ++k) delta[k] = p[k] - (k == y ? 1.0 : 0.0);
                } else {
                    const auto t = train.target(idx);
                    const double inv = 1.0 / static_cast<double>(sig.output_dim);
                    for (std::size_t k = 0; k < sig.output_dim; ++k) {
                        const double e = act.back()[k] - t[k];
                        epoch_loss += e * e * inv;
                        delta[k] = 2.0 * e * inv;
                    }
                }
                for (std::size_t l = layers.size(); l-- > 0;) {
                    const Layer& L = layers[l];
                    for (std::size_t r = 0; r < L.out_dim; ++r)
                        delta[r] *= activate_derivative(L.activation, pre[l][r], act[l + 1][r]);
                    std::vector<double> prev(L.in_dim, 0.0);
                    for (std::size_t r = 0; r < L.out_dim; ++r) {
                        grads[l].b[r] += delta[r];
                        for (std::size_t c = 0; c < L.in_dim; ++c) {
                            grads[l].w[r * L.in_dim + c] += delta[r] * act[l][c];
                            prev[c] += L.weight(r, c) * delta[r];
                        }
                    }
                    delta = std::move(prev);
                }
            }
            ++step;
            const double scale = 1.0 / static_cast<double>(end - start);
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            auto update = [&](std::vector<double>& param, const std::vector<double>& g, AdamState& st) {
                for (std::size_t i = 0; i < param.size(); ++i) {
                    const double gi = g[i] * scale;
                    st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * gi;
                    st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * gi * gi;
                    param[i] -= options.learning_rate * (st.m[i] / c1) / (std::sqrt(st.v[i] / c2) + eps);
                }
            };
            for (std::size_t l = 0; l < layers.size(); ++l) {
                update(layers[l].weights, grads[l].w, adam_w[l]);
                update(layers[l].bias, grads[l].b, adam_b[l]);
            }
        }
        epoch_loss /= static_cast<double>(train.rows);
        if (!std::isfinite(epoch_loss))
            throw NumericError("training diverged (non-finite loss) in epoch " + std::to_string(epoch), -1);
    }

    Model model(sig, std::move(layers));
    if (report) {
        report->final_loss = epoch_loss;
        report->train_metric = classify ? accuracy(model, train) : mean_squared_error(model, train);
        if (test) report->test_metric = classify ? accuracy(model, *test) : mean_squared_error(model, *test);
    }
    return model;
}

double accuracy(const Model& model, const Dataset& data) {
    if (!data.has_labels()) throw InputError("accuracy needs labels");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.rows; ++i)
        if (model.predict_label(data.row(i)) == static_cast<std::size_t>(data.labels[i])) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.rows);
}

double input_mse(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size() || prediction.empty())
        throw InputError("prediction and target lengths differ");
    double s = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) s += (prediction[k] - target[k]) * (prediction[k] - target[k]);
    return s / static_cast<double>(target.size());
}

double mean_squared_error(const Model& model, const Dataset& data) {
    if (!data.has_targets()) throw InputError("MSE needs targets");
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) total += input_mse(model.forward(data.row(i)), data.target(i));
    return total / static_cast<double>(data.rows);
}

}  // namespace certpri
