#include "certpri/model.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "certpri/error.hpp"
#include "certpri/io.hpp"

namespace certpri {

namespace {

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::string layer_tag(std::size_t i) { return "layer " + std::to_string(i) + ": "; }

}  // namespace

std::string_view to_string(Task task) {
    return task == Task::classification ? "classification" : "regression";
}

std::string_view to_string(Activation act) {
    switch (act) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

Task parse_task(std::string_view name) {
    if (name == "classification") return Task::classification;
    if (name == "regression") return Task::regression;
    throw InputError("unknown task '" + std::string(name) + "'");
}

Activation parse_activation(std::string_view name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "sigmoid") return Activation::sigmoid;
    throw InputError("unknown activation '" + std::string(name) + "'");
}

void ModelSignature::validate() const {
    if (input_dim < 1) throw InputError("input_dim must be >= 1");
    if (task == Task::classification && output_dim < 2)
        throw InputError("classification models need output_dim >= 2");
    if (task == Task::regression && output_dim < 1)
        throw InputError("regression models need output_dim >= 1");
    if (output_min.has_value() != output_max.has_value())
        throw InputError("output_min and output_max must be given together");
    if (output_min && !(*output_min < *output_max))
        throw InputError("output_min must be < output_max");
}

double activate(Activation act, double z) {
    switch (act) {
        case Activation::identity: return z;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
        case Activation::sigmoid:
            // Split on sign so exp never overflows.
            if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
            {
                const double e = std::exp(z);
                return e / (1.0 + e);
            }
    }
    return z;
}

double activate_derivative(Activation act, double z, double a) {
    switch (act) {
        case Activation::identity: return 1.0;
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;  // subgradient 0 at the kink
        case Activation::tanh: return 1.0 - a * a;
        case Activation::sigmoid: return a * (1.0 - a);
    }
    return 1.0;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - top);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

struct Model::Trace {
    // activations[0] is the input; activations[i + 1] is the output of layer i.
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> activations;
    std::vector<double> output;
};

Model::Model(ModelSignature signature, std::vector<Layer> layers)
    : signature_(std::move(signature)), layers_(std::move(layers)) {
    signature_.validate();
    if (layers_.empty()) throw InputError("model has no layers");
    std::size_t expected_in = signature_.input_dim;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& layer = layers_[i];
        if (layer.in_dim != expected_in)
            throw InputError(layer_tag(i) + "input dim " + std::to_string(layer.in_dim) +
                             " does not match preceding dim " + std::to_string(expected_in));
        if (layer.out_dim < 1) throw InputError(layer_tag(i) + "empty output");
        if (layer.weights.size() != layer.in_dim * layer.out_dim)
            throw InputError(layer_tag(i) + "weight matrix has wrong size");
        if (layer.bias.size() != layer.out_dim)
            throw InputError(layer_tag(i) + "bias has wrong length");
        if (!all_finite(layer.weights) || !all_finite(layer.bias))
            throw InputError(layer_tag(i) + "non-finite parameter");
        expected_in = layer.out_dim;
    }
    if (expected_in != signature_.output_dim)
        throw InputError(layer_tag(layers_.size() - 1) + "output dim " +
                         std::to_string(expected_in) + " does not match output_dim " +
                         std::to_string(signature_.output_dim));
}

void Model::run(std::span<const double> x, Trace& trace) const {
    if (x.size() != signature_.input_dim)
        throw InputError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(signature_.input_dim));
    if (!all_finite(x)) throw InputError("non-finite input");

    trace.pre.resize(layers_.size());
    trace.activations.resize(layers_.size() + 1);
    trace.activations[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const std::vector<double>& in = trace.activations[l];
        std::vector<double>& z = trace.pre[l];
        std::vector<double>& a = trace.activations[l + 1];
        z.resize(layer.out_dim);
        a.resize(layer.out_dim);
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            const double* row = layer.weights.data() + r * layer.in_dim;
            double acc = layer.bias[r];
            for (std::size_t c = 0; c < layer.in_dim; ++c) acc += row[c] * in[c];
            z[r] = acc;
            a[r] = activate(layer.activation, acc);
        }
        if (!all_finite(a))
            throw NumericError(layer_tag(l) + "non-finite activation", static_cast<int>(l));
    }
    if (signature_.task == Task::classification)
        trace.output = softmax(trace.activations.back());
    else
        trace.output = trace.activations.back();
}

std::vector<double> Model::forward(std::span<const double> x) const {
    Trace trace;
    run(x, trace);
    return std::move(trace.output);
}

std::size_t Model::predict_label(std::span<const double> x) const {
    if (signature_.task != Task::classification)
        throw InputError("predict_label requires a classification model");
    return argmax(forward(x));
}

double Model::input_gradient(std::span<const double> x, const OutputReduction& reduce,
                             std::span<double> grad) const {
    if (grad.size() != signature_.input_dim)
        throw InputError("gradient buffer has wrong length");
    Trace trace;
    run(x, trace);

    std::vector<double> d_out(trace.output.size(), 0.0);
    const double value = reduce(trace.output, d_out);
    if (!std::isfinite(value) || !all_finite(d_out))
        throw NumericError("output head produced a non-finite value", -1);

    // Back through softmax: dz = p * (dy - <dy, p>).
    std::vector<double> delta;
    if (signature_.task == Task::classification) {
        const std::vector<double>& p = trace.output;
        double dot = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) dot += d_out[i] * p[i];
        delta.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) delta[i] = p[i] * (d_out[i] - dot);
    } else {
        delta = std::move(d_out);
    }

    for (std::size_t l = layers_.size(); l-- > 0;) {
        const Layer& layer = layers_[l];
        const std::vector<double>& z = trace.pre[l];
        const std::vector<double>& a = trace.activations[l + 1];
        for (std::size_t r = 0; r < layer.out_dim; ++r)
            delta[r] *= activate_derivative(layer.activation, z[r], a[r]);
        std::vector<double> prev(layer.in_dim, 0.0);
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            const double* row = layer.weights.data() + r * layer.in_dim;
            const double d = delta[r];
            if (d == 0.0) continue;
            for (std::size_t c = 0; c < layer.in_dim; ++c) prev[c] += row[c] * d;
        }
        if (!all_finite(prev))
            throw NumericError(layer_tag(l) + "non-finite gradient", static_cast<int>(l));
        delta = std::move(prev);
    }
    std::copy(delta.begin(), delta.end(), grad.begin());
    return value;
}

// --- serialization ---------------------------------------------------------

using nlohmann::json;

std::string model_to_json(const Model& model) {
    const ModelSignature& sig = model.signature();
    json doc;
    doc["task"] = to_string(sig.task);
    doc["input_dim"] = sig.input_dim;
    doc["output_dim"] = sig.output_dim;
    if (sig.output_min) {
        doc["output_min"] = *sig.output_min;
        doc["output_max"] = *sig.output_max;
    }
    json layers = json::array();
    for (const Layer& layer : model.layers()) {
        json rows = json::array();
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < layer.in_dim; ++c) row.push_back(layer.weight(r, c));
            rows.push_back(std::move(row));
        }
        layers.push_back({{"activation", to_string(layer.activation)},
                          {"weights", std::move(rows)},
                          {"bias", layer.bias}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump(1) + "\n";
}

namespace {

double finite_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(where + "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw InputError(where + "non-finite value");
    return d;
}

}  // namespace

Model model_from_json(std::string_view text) {
    // NaN/Infinity literals are not JSON; let the parser reject them.
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw InputError("model file is not a JSON object");
    try {
        ModelSignature sig;
        sig.task = parse_task(doc.at("task").get<std::string>());
        const auto input_dim = doc.at("input_dim").get<long long>();
        const auto output_dim = doc.at("output_dim").get<long long>();
        if (input_dim < 1 || output_dim < 1) throw InputError("dimensions must be positive");
        sig.input_dim = static_cast<std::size_t>(input_dim);
        sig.output_dim = static_cast<std::size_t>(output_dim);
        if (doc.contains("output_min") && !doc["output_min"].is_null())
            sig.output_min = finite_number(doc["output_min"], "output_min: ");
        if (doc.contains("output_max") && !doc["output_max"].is_null())
            sig.output_max = finite_number(doc["output_max"], "output_max: ");

        const json& layers_json = doc.at("layers");
        if (!layers_json.is_array()) throw InputError("'layers' must be an array");
        std::vector<Layer> layers;
        for (std::size_t i = 0; i < layers_json.size(); ++i) {
            const json& lj = layers_json[i];
            const std::string tag = layer_tag(i);
            Layer layer;
            layer.activation = parse_activation(lj.at("activation").get<std::string>());
            const json& rows = lj.at("weights");
            if (!rows.is_array() || rows.empty()) throw InputError(tag + "weights must be a non-empty matrix");
            layer.out_dim = rows.size();
            layer.in_dim = rows[0].is_array() ? rows[0].size() : 0;
            if (layer.in_dim == 0) throw InputError(tag + "weights must be a non-empty matrix");
            layer.weights.reserve(layer.in_dim * layer.out_dim);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (!rows[r].is_array() || rows[r].size() != layer.in_dim)
                    throw InputError(tag + "weight row " + std::to_string(r) + " has wrong length");
                for (const json& v : rows[r]) layer.weights.push_back(finite_number(v, tag));
            }
            const json& bias = lj.at("bias");
            if (!bias.is_array()) throw InputError(tag + "bias must be an array");
            for (const json& v : bias) layer.bias.push_back(finite_number(v, tag));
            layers.push_back(std::move(layer));
        }
        return Model(std::move(sig), std::move(layers));
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed model file: ") + e.what());
    }
}

Model load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

void save_model(const Model& model, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(model));
}

}  // namespace certpri
