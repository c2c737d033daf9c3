#pragma once

#include <stdexcept>
#include <string>

namespace cgtomo {

/// Covariance matrix (or derived quantity) violates the physicality bound.
struct NonPhysicalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 4x4 covariance matrix does not have the two-mode squeezed thermal structure.
struct NotTmstFormError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSigmaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnphysicalReservoirError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateDenominatorError : std::domain_error {
    using std::domain_error::domain_error;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cgtomo
