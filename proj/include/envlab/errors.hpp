#pragma once

#include <stdexcept>
#include <string>

namespace envlab {

// Rejected inputs: bad shapes, unknown labels, violated preconditions.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical guarantee the engine promises was found broken (e.g. the
// envariance gate inside the Born pipeline). Maps to exit code 3.
class ContractViolation : public std::runtime_error {
public:
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

} // namespace envlab
