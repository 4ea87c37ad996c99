#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reisda {

// Caller handed us something that violates a precondition.
class InvalidInputError : public std::invalid_argument {
public:
    explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative solver ran out of budget; carries the residual it got stuck at
// and, when meaningful, the best iterate found so far.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    ConvergenceError(const std::string& what, double residual, std::vector<double> best)
        : std::runtime_error(what), residual_(residual), best_iterate_(std::move(best)) {}

    double residual() const { return residual_; }
    const std::vector<double>& best_iterate() const { return best_iterate_; }

private:
    double residual_ = 0.0;
    std::vector<double> best_iterate_;
};

// The constraint set of an optimization problem is empty.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced a non-finite loss; names the epoch where it happened.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int epoch)
        : std::runtime_error(what), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_ = -1;
};

// File-system failure; carries the offending path.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace reisda
