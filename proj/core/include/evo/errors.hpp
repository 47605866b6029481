#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its documented range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operand shapes (dof, grid, mode count) do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A linear step system could not be factorized.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double smallest_singular_value)
        : Error(what), smallest_singular_value_(smallest_singular_value) {}

    double smallest_singular_value() const noexcept { return smallest_singular_value_; }

private:
    double smallest_singular_value_;
};

/// The Picard iteration would not contract at the requested weight.
class ContractionBudgetError : public ParameterError {
public:
    ContractionBudgetError(const std::string& what, double q_bound, double nu_min)
        : ParameterError(what), q_bound_(q_bound), nu_min_(nu_min) {}

    double q_bound() const noexcept { return q_bound_; }
    double nu_min() const noexcept { return nu_min_; }

private:
    double q_bound_;
    double nu_min_;
};

/// The Picard iteration hit max_iter before reaching the tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> residual_history)
        : Error(what), residual_history_(std::move(residual_history)) {}

    const std::vector<double>& residual_history() const noexcept { return residual_history_; }

private:
    std::vector<double> residual_history_;
};

} // namespace evo
