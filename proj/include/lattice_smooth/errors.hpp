#pragma once

#include <stdexcept>
#include <string>

namespace latsm {

// Invalid model/config input (bad coefficient table, nonzero-mean law, ...).
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// Requested lattice does not fit in addressable/safe-integer range.
class capacity_error : public std::length_error {
public:
    explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

// Argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Model family not covered by an analytic routine.
class unsupported_model_error : public std::invalid_argument {
public:
    explicit unsupported_model_error(const std::string& what) : std::invalid_argument(what) {}
};

// Bandwidth so small that a kernel window contains no design point.
class degenerate_bandwidth_error : public std::runtime_error {
public:
    explicit degenerate_bandwidth_error(const std::string& what) : std::runtime_error(what) {}
};

// Missing pieces in an otherwise well-formed problem (e.g. no true regression
// function where one is required).
class configuration_error : public std::runtime_error {
public:
    explicit configuration_error(const std::string& what) : std::runtime_error(what) {}
};

// Iteration caps exceeded, divergent integrals, and similar numeric failures.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace latsm
