#pragma once

#include <stdexcept>
#include <string>

namespace openbook {

/// Input that violates a documented precondition (bad book, bad parameters,
/// schema errors). The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative method stopped without meeting its tolerance. Exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed. Exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace openbook
