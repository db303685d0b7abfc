#pragma once

#include <stdexcept>
#include <string>

namespace qmetro {

// Common base so the CLI can map any library failure to exit code 2.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotHermitianError : Error {
    explicit NotHermitianError(const std::string& msg) : Error(msg) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

struct NegativeEigenvalueError : Error {
    explicit NegativeEigenvalueError(const std::string& msg) : Error(msg) {}
};

struct DegenerateSampleError : Error {
    explicit DegenerateSampleError(const std::string& msg) : Error(msg) {}
};

struct BlochNormViolation : Error {
    explicit BlochNormViolation(const std::string& msg) : Error(msg) {}
};

struct RangeViolation : Error {
    explicit RangeViolation(const std::string& msg) : Error(msg) {}
};

struct SpectrumError : Error {
    explicit SpectrumError(const std::string& msg) : Error(msg) {}
};

struct NotConvergedError : Error {
    explicit NotConvergedError(const std::string& msg) : Error(msg) {}
};

struct NonUnitNormGenerator : Error {
    explicit NonUnitNormGenerator(const std::string& msg) : Error(msg) {}
};

struct DegenerateDataError : Error {
    explicit DegenerateDataError(const std::string& msg) : Error(msg) {}
};

struct SingularDesignError : Error {
    explicit SingularDesignError(const std::string& msg) : Error(msg) {}
};

}  // namespace qmetro
