#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "certpri/dataset.hpp"
#include "certpri/model.hpp"

namespace certpri {

struct Architecture {
    std::vector<std::size_t> hidden{16};
    Activation activation = Activation::tanh;
};

struct TrainOptions {
    std::size_t epochs = 100;
    double learning_rate = 1e-2;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    // Classification only; inferred from the largest label when unset.
    std::optional<std::size_t> num_classes;
};

struct TrainReport {
    double final_loss = 0.0;
    double train_metric = 0.0;  // accuracy or MSE
    std::optional<double> test_metric;
};

// Glorot-uniform weights, zero biases. Classification models end in an
// identity layer followed by the implicit softmax.
Model init_model(const ModelSignature& signature, const Architecture& arch, std::uint64_t seed);

// Mini-batch Adam on cross-entropy (classification) or MSE (regression).
// Regression models get an output domain of the training-target range
// widened by 10% on each side.
Model train_toy(const Dataset& train, const Architecture& arch, const TrainOptions& options,
                TrainReport* report = nullptr, const Dataset* test = nullptr);

double accuracy(const Model& model, const Dataset& data);
double mean_squared_error(const Model& model, const Dataset& data);
// Mean over outputs of the squared error of one input.
double input_mse(std::span<const double> prediction, std::span<const double> target);

}  // namespace certpri
