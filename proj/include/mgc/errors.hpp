#pragma once

#include <stdexcept>
#include <string>

namespace mgc {

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DisconnectedGraph : GraphError {
    using GraphError::GraphError;
};

struct NonpositiveLength : GraphError {
    using GraphError::GraphError;
};

struct DanglingVertexReference : GraphError {
    using GraphError::GraphError;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonpositiveTime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MassMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AtomicMeasure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDenominator : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EntropyInfinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mgc
