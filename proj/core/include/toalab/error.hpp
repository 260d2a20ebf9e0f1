#pragma once

#include <stdexcept>
#include <string>

namespace toalab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An input violates a type invariant or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A computation hit a singularity or failed to converge.
class NumericalError : public Error {
public:
    NumericalError(std::string module, std::string operation, std::string detail)
        : Error(module + "::" + operation + ": " + detail),
          module_(std::move(module)), operation_(std::move(operation)), detail_(std::move(detail)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string module_;
    std::string operation_;
    std::string detail_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace toalab
