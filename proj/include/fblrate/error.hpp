#pragma once

#include <stdexcept>
#include <string>

namespace fblrate {

/// Argument outside the domain of a mathematical function (x <= 0 for Ψ, p outside (0,1) for Q⁻¹, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Matrix or antenna dimensions that do not fit together.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scenario outside the validity region of the high-SNR approximation.
/// The message names the violated inequality.
class ValidityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An optimization or bound evaluation with no admissible point.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Singular spectrum with coincident values where a strict gap is required.
class DegenerateSpectrumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fblrate
