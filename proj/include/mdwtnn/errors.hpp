#ifndef MDWTNN_ERRORS_HPP
#define MDWTNN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mdwtnn {

// Error categories map onto the CLI exit-code contract:
// usage -> 1, io -> 2, numerical -> 3.
enum class ErrorKind { usage, io, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& msg) : Error(ErrorKind::usage, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(ErrorKind::numerical, msg) {}
};

// SVD failed to converge within the sweep cap; carries the remaining residual.
struct SvdConvergenceError : NumericalError {
    SvdConvergenceError(const std::string& msg, double residual)
        : NumericalError(msg), residual(residual) {}
    double residual;
};

// Non-finite values appeared mid-iteration in the ADMM loop.
struct DivergenceError : NumericalError {
    DivergenceError(const std::string& msg, int iteration)
        : NumericalError(msg), iteration(iteration) {}
    int iteration;
};

// ifft_mode3 was handed a spectrum whose inverse is not real.
struct SymmetryError : NumericalError {
    explicit SymmetryError(const std::string& msg) : NumericalError(msg) {}
};

} // namespace mdwtnn

#endif
