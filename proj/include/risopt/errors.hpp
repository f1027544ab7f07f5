#pragma once

#include <stdexcept>
#include <string>

namespace risopt {

// Nonphysical geometry: nonpositive radius/distance, empty node sets.
struct InvalidGeometryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Out-of-range model parameter (negative Rician factor, nonpositive variance, ...).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Tensor/vector dimensions do not match the declared network or scenario shape.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Action vector malformed (wrong length).
struct InvalidActionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation called in the wrong order (step before reset, stale cache).
struct InvalidStateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Degenerate numeric input (zero beamformer, empty batch).
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numeric failure (singular solve).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal dimension bookkeeping broke; indicates a bug, not bad user input.
struct InternalConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

// File I/O failure, message carries the path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace risopt
