#pragma once

#include <stdexcept>
#include <string>

namespace moderr {

/// Inconsistent matrix/vector dimensions in an operation's inputs.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical precondition failed: indefinite covariance, singular inner
/// matrix, factorization breakdown, solver breakdown.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Likelihood underflowed to zero for every particle.
struct DegenerateLikelihoodError : NumericalError {
    explicit DegenerateLikelihoodError(const std::string& what) : NumericalError(what) {}
};

/// Fewer than three usable points above the plateau floor in a rate fit.
struct InsufficientDecayError : std::runtime_error {
    explicit InsufficientDecayError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value or malformed config file.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace moderr
