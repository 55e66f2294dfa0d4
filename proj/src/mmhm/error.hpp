#ifndef MMHM_ERROR_HPP
#define MMHM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mmhm {

// Error hierarchy of the C++ core. The C API maps each class onto a status
// code, and the CLI maps status codes onto process exit codes.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters (k >= N, weights not summing to one, bad CLI values).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data: non-finite coordinates, shape mismatches, bad files.
class DataError : public Error {
public:
    using Error::Error;
};

/// An internal invariant did not hold (oracle mismatch, cyclic matching).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Analysis preconditions not met (series too short, missing metric).
class AnalysisError : public Error {
public:
    using Error::Error;
};

} // namespace mmhm

#endif // MMHM_ERROR_HPP
