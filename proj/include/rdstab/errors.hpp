#pragma once

#include <stdexcept>
#include <string>

namespace rdstab {

// Bad user input: malformed matrices, negative entries, dimension mismatches,
// inadmissible couplings, unparseable files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numeric routine could not reach its accuracy contract.  Carries the best
// estimate and the residual observed when it gave up, for diagnostics.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg, double best_estimate = 0.0,
                          double residual = 0.0)
        : std::runtime_error(msg), best_estimate_(best_estimate), residual_(residual) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double residual() const noexcept { return residual_; }

private:
    double best_estimate_;
    double residual_;
};

// Internal inconsistency inside the LP engine (cycling guard tripped, a
// reported solution failed re-substitution, a Farkas ray failed its check).
class LpError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace rdstab
