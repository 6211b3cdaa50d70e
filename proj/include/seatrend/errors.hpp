#pragma once

#include <stdexcept>
#include <string>

namespace seatrend {

// Invalid argument: sizes disagree, factor does not divide, empty input, ...
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Input is structurally valid but degenerate for the operation
// (constant feature column, all-identical affinity rows, ...).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file: bad magic, wrong version, truncated payload.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed file with inconsistent contents (mask changes across time, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested mode is outside what the implementation supports.
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: singular system, repair loop exhausted.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Loss became non-finite during optimization; carries the epoch index.
class TrainingDivergedError : public std::runtime_error {
public:
    TrainingDivergedError(const std::string& msg, int epoch_index)
        : std::runtime_error(msg), epoch(epoch_index) {}
    int epoch;
};

} // namespace seatrend
