#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqzap {

/// Base class for solver failures that are not plain argument errors.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A measurement row lies (numerically) in the span of the rows already held.
class DegenerateRowError : public SolverError {
public:
    using SolverError::SolverError;
};

/// More rows than the signal dimension were requested.
class CapacityError : public SolverError {
public:
    using SolverError::SolverError;
};

/// An iterate became non-finite.
class DivergenceError : public SolverError {
public:
    DivergenceError(std::size_t iteration, const std::string& what)
        : SolverError(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace seqzap
