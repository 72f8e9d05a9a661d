#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "certpri/rng.hpp"

namespace certpri {

enum class Norm { l1, l2, linf };

Norm parse_norm(std::string_view text);  // "1", "2", "inf"
std::string to_string(Norm p);
// Hoelder dual: 1 <-> inf, 2 <-> 2.
Norm dual(Norm p);
double norm(std::span<const double> v, Norm p);

// Closed ball B_p(center, radius).
struct BallSpec {
    std::vector<double> center;
    double radius = 0.0;
    Norm p = Norm::l2;

    void validate() const;
};

// One uniform draw from the ball, written to `out` (size = center size).
void sample(const BallSpec& spec, Rng& rng, std::span<double> out);
std::vector<double> sample(const BallSpec& spec, Rng& rng);

std::vector<std::vector<double>> sample_batch(const BallSpec& spec, std::size_t count, Rng& rng);

}  // namespace certpri
