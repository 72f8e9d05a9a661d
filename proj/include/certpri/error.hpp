#pragma once

#include <stdexcept>
#include <string>

namespace certpri {

// Bad user-supplied data: malformed files, shape mismatches, out-of-range
// parameters. The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure while evaluating a model (overflow, NaN), tagged with the
// layer that produced it. -1 means the failure was in the output head.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, int layer)
        : std::runtime_error(what), layer_(layer) {}

    int layer() const noexcept { return layer_; }

private:
    int layer_;
};

// A broken internal invariant. Exit code 2 in the CLI.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace certpri
