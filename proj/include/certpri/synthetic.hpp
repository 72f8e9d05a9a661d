#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "certpri/dataset.hpp"

namespace certpri {

enum class Generator { gaussian_blobs, two_moons, linear_regression_noise };
std::string_view to_string(Generator g);
Generator parse_generator(std::string_view text);

struct SyntheticSpec {
    Generator generator = Generator::gaussian_blobs;
    std::size_t classes = 3;     // blobs; moons always has 2
    std::size_t output_dim = 1;  // regression targets
    std::size_t input_dim = 2;
    std::size_t train_count = 1000;
    std::size_t test_count = 500;
    // Fraction of training labels (or regression targets) corrupted. Test
    // ground truth is never corrupted.
    double label_noise = 0.0;
    // Blob standard deviation; offsets in the first two coordinates are
    // truncated at 2.5 spread.
    double spread = 1.0;
    // Distance between neighbouring blob centers.
    double separation = 6.0;
    double moon_noise = 0.1;
    double target_noise = 0.1;
    // Fraction of test points replaced by uniform draws from a box around the
    // data, labelled by their nearest blob center.
    double off_manifold = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    Dataset train;
    Dataset test;
    std::vector<std::vector<double>> centers;  // blob centers
    std::vector<double> weights;               // regression W, row-major output_dim x input_dim
    std::vector<std::size_t> corrupted_train;  // indices whose ground truth was corrupted
};

SyntheticData gen_synthetic(const SyntheticSpec& spec);

}  // namespace certpri
