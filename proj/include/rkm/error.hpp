#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rkm {

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation declined to run on otherwise valid input (cap exceeded,
/// too few samples, vacuous hypothesis).
class Refusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside a library routine (eigensolver, factorization).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a trajectory leaves the finite/bounded region.
class IntegrationAborted : public std::runtime_error {
public:
    IntegrationAborted(const std::string& what, std::size_t lastValidIndex)
        : std::runtime_error(what), lastValidIndex_(lastValidIndex) {}

    std::size_t lastValidIndex() const noexcept { return lastValidIndex_; }

private:
    std::size_t lastValidIndex_;
};

}  // namespace rkm
