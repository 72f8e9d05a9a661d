#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "certpri/model.hpp"

namespace certpri {

// Target probability for the predicted class: min{p (1 + ln(1 + p)), 1}.
// Requires p in (0, 1).
double class_center(double p_c);

// Regression target for one output: clip(f + |f| ln(1 + tanh f)) into
// [min_r, max_r]. Requires min_r < max_r.
double regression_center(double f, double min_r = -std::numeric_limits<double>::infinity(),
                         double max_r = std::numeric_limits<double>::infinity());

// Gap between the model output and its target position.
//   classification: h = class_center(p_c) - p_c, center_value = {class_center(p_c)}
//   regression:     h = mean_i |regression_center(f_i) - f_i|, center_value = per-output centers
struct CenterGap {
    double h_value = 0.0;
    std::vector<double> center_value;
};

// Resolves the class from the model's prediction at x.
CenterGap center_gap(const Model& model, std::span<const double> x);
// Classification with the class index held fixed (ignored for regression).
CenterGap center_gap(const Model& model, std::span<const double> x, std::size_t frozen_class);

// Output reduction computing the center gap and its derivative with respect
// to the model outputs, for use with Model::input_gradient.
OutputReduction center_gap_reduction(const ModelSignature& signature, std::size_t frozen_class);

}  // namespace certpri
