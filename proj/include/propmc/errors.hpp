#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace propmc {

// Failure raised from inside a module after validation passed (diverging
// estimator, overflowing moment, non-convergent quadrature, ...).  Carries the
// originating module name so the CLI can map it to its exit code.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(std::string module, const std::string& what, double error_estimate)
        : NumericalError(std::move(module), what), error_estimate_(error_estimate) {}

    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

}  // namespace propmc
