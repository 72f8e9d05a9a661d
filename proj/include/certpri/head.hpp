#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "certpri/model.hpp"

namespace certpri {

// Scalar function h: R^d -> R whose local Lipschitz constant the
// prioritizer estimates. Implementations are immutable and thread-safe.
class ScalarHead {
public:
    virtual ~ScalarHead() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    // Writes the gradient into `grad` (size dim()) and returns h(x).
    virtual double value_and_gradient(std::span<const double> x, std::span<double> grad) const = 0;
};

// Center gap of a model around a reference input. For classification the
// class index is resolved once, at the reference input, and then held
// fixed so h stays continuous across the sampling ball.
class CenterGapHead final : public ScalarHead {
public:
    CenterGapHead(const Model& model, std::span<const double> reference);

    std::size_t dim() const override { return model_->input_dim(); }
    double value(std::span<const double> x) const override;
    double value_and_gradient(std::span<const double> x, std::span<double> grad) const override;

    std::size_t frozen_class() const noexcept { return frozen_class_; }

private:
    const Model* model_;
    std::size_t frozen_class_ = 0;
    OutputReduction reduction_;
};

// h(x) = w . x + b
class LinearHead final : public ScalarHead {
public:
    LinearHead(std::vector<double> w, double b);

    std::size_t dim() const override { return w_.size(); }
    double value(std::span<const double> x) const override;
    double value_and_gradient(std::span<const double> x, std::span<double> grad) const override;

    const std::vector<double>& weights() const noexcept { return w_; }

private:
    std::vector<double> w_;
    double b_;
};

}  // namespace certpri
