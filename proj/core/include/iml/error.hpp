#pragma once

#include <stdexcept>
#include <string>

namespace iml {

/// Malformed input or a violated precondition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The optimizer met a non-finite objective or gradient.
class SolverError : public Error {
public:
    SolverError(const std::string& what, int iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

} // namespace iml
