#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace certpri {

enum class Task { classification, regression };
enum class Activation { identity, relu, tanh, sigmoid };

std::string_view to_string(Task task);
std::string_view to_string(Activation act);
Task parse_task(std::string_view name);
Activation parse_activation(std::string_view name);

struct ModelSignature {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    Task task = Task::classification;
    // Regression output domain [min_r, max_r]. Absent bounds mean no clipping.
    std::optional<double> output_min;
    std::optional<double> output_max;

    void validate() const;
};

// Dense layer: out = act(W in + b), W stored row-major with one row per
// output neuron.
struct Layer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<double> weights;
    std::vector<double> bias;
    Activation activation = Activation::identity;

    double weight(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }
};

// Reduces the model output vector to a scalar. Writes d(scalar)/d(output)
// into `d_output` (same length as `output`) and returns the scalar.
using OutputReduction =
    std::function<double(std::span<const double> output, std::span<double> d_output)>;

class Model {
public:
    Model(ModelSignature signature, std::vector<Layer> layers);

    const ModelSignature& signature() const noexcept { return signature_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::size_t input_dim() const noexcept { return signature_.input_dim; }
    std::size_t output_dim() const noexcept { return signature_.output_dim; }
    Task task() const noexcept { return signature_.task; }

    // Probability vector for classification (softmax applied after the last
    // layer), raw outputs for regression.
    std::vector<double> forward(std::span<const double> x) const;

    std::size_t predict_label(std::span<const double> x) const;

    // Reverse-mode gradient of reduce(forward(x)) with respect to x. Returns
    // the reduced scalar; `grad` must have input_dim entries.
    double input_gradient(std::span<const double> x, const OutputReduction& reduce,
                          std::span<double> grad) const;

private:
    struct Trace;
    void run(std::span<const double> x, Trace& trace) const;

    ModelSignature signature_;
    std::vector<Layer> layers_;
};

// argmax with ties resolved to the lowest index.
std::size_t argmax(std::span<const double> values);

// Numerically stable softmax (max subtraction).
std::vector<double> softmax(std::span<const double> logits);

double activate(Activation act, double z);
// Derivative expressed through the pre-activation z and activation a.
double activate_derivative(Activation act, double z, double a);

std::string model_to_json(const Model& model);
Model model_from_json(std::string_view text);
Model load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

}  // namespace certpri
