#pragma once

#include <stdexcept>
#include <string>

namespace unbiased {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when elimination meets a pivot below the singularity floor.
class SingularMatrix : public Error {
public:
    SingularMatrix(double pivot_magnitude, double floor)
        : Error("singular matrix: pivot magnitude " + std::to_string(pivot_magnitude) +
                " below floor " + std::to_string(floor)),
          pivot_magnitude_(pivot_magnitude) {}

    double pivot_magnitude() const noexcept { return pivot_magnitude_; }

private:
    double pivot_magnitude_;
};

/// Raised when a coordinate that must live on the torus is zero.
class ZeroEntry : public Error {
public:
    ZeroEntry(int row, int col)
        : Error("zero entry at (" + std::to_string(row) + "," + std::to_string(col) + ")"),
          row_(row), col_(col) {}

    int row() const noexcept { return row_; }
    int col() const noexcept { return col_; }

private:
    int row_;
    int col_;
};

/// Raised by exact enumerations whose cost grows factorially.
class SizeGuard : public Error {
public:
    SizeGuard(int n, int limit)
        : Error("size guard: n = " + std::to_string(n) + " exceeds limit " + std::to_string(limit)) {}
};

/// Raised when an argument violates a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace unbiased
