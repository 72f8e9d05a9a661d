#include "certpri/head.hpp"

#include <algorithm>

#include "certpri/centers.hpp"
#include "certpri/error.hpp"

namespace certpri {

CenterGapHead::CenterGapHead(const Model& model, std::span<const double> reference) : model_(&model) {
    if (model.task() == Task::classification) frozen_class_ = model.predict_label(reference);
    reduction_ = center_gap_reduction(model.signature(), frozen_class_);
}

double CenterGapHead::value(std::span<const double> x) const {
    return center_gap(*model_, x, frozen_class_).h_value;
}

double CenterGapHead::value_and_gradient(std::span<const double> x, std::span<double> grad) const {
    return model_->input_gradient(x, reduction_, grad);
}

LinearHead::LinearHead(std::vector<double> w, double b) : w_(std::move(w)), b_(b) {
    if (w_.empty()) throw InputError("linear head needs at least one weight");
}

double LinearHead::value(std::span<const double> x) const {
    if (x.size() != w_.size()) throw InputError("linear head: dimension mismatch");
    double acc = b_;
    for (std::size_t i = 0; i < w_.size(); ++i) acc += w_[i] * x[i];
    return acc;
}

double LinearHead::value_and_gradient(std::span<const double> x, std::span<double> grad) const {
    if (grad.size() != w_.size()) throw InputError("linear head: gradient buffer has wrong length");
    std::copy(w_.begin(), w_.end(), grad.begin());
    return value(x);
}

}  // namespace certpri
