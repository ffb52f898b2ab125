#pragma once

#include <stdexcept>
#include <string>

namespace dse {

/// Base class for all library errors.
class Error : public std::runtime_error {
   public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape or dimension mismatch in matrix/vector arguments.
class StructuralError : public Error {
   public:
    explicit StructuralError(const std::string& what) : Error(what) {}
};

/// Invalid configuration: scenario fields, walk/graph checks, observability.
class ConfigError : public Error {
   public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A required inter-node value is missing (e.g. upstream estimate not received).
class ProtocolError : public Error {
   public:
    explicit ProtocolError(const std::string& what) : Error(what) {}
};

/// Numerical failure during integration; carries the first failure time.
class IntegrationError : public Error {
   public:
    IntegrationError(const std::string& what, double t)
        : Error(what + " (at t = " + std::to_string(t) + ")"), t_fail(t) {}
    double t_fail;
};

}  // namespace dse
