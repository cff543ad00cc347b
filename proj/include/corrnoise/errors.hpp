// errors.hpp — Exception types raised by the simulation library

#pragma once

#include <stdexcept>
#include <string>

namespace corrnoise {

// Malformed or out-of-domain input (non-finite positions, bad sizes, ...).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Problem too large for the requested engine.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// State invariants broke during time integration.
struct IntegrationDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Correlation matrix has an eigenvalue below the PSD tolerance.
struct NumericalPsdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A closed-form prediction was requested outside its regime of validity.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Time series does not contain the sample an observable needs.
struct SamplingGridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Feature extraction (step position, packet width, fits) found nothing usable.
struct ExtractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unparseable or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace corrnoise
