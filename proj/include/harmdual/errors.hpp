#pragma once

#include <stdexcept>
#include <string>

namespace harmdual {

/// Rejected input: malformed matrices, out-of-domain parameters, bad configs.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure past validation: overflow, ill-conditioning,
/// eigensolver breakdown, eigenvalues below the PSD floor.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature grid cannot resolve the requested object: the deviation is
/// dominated by truncation/undersampling, so the result would be meaningless.
/// Carries the observed deficit so callers can decide how to enlarge the grid.
class grid_error : public std::runtime_error {
public:
    grid_error(const std::string& what, double deficit)
        : std::runtime_error(what), deficit_(deficit) {}

    /// Magnitude of the violated consistency check (e.g. |trace - 1|).
    double deficit() const noexcept { return deficit_; }

private:
    double deficit_;
};

} // namespace harmdual
