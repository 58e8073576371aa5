#pragma once

#include <stdexcept>
#include <string>

namespace xhdg {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input to an operation (degenerate domain, unknown name, unsupported degree, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The mesh does not resolve the interface: an edge is cut twice, a cell has more
/// than two crossings, or every vertex of a cell sits on the interface.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

/// Local velocity block of a cell is not positive definite.
class SingularLocalVelocityBlock : public Error {
public:
    SingularLocalVelocityBlock(int cell, const std::string& what)
        : Error(what), cell_(cell) {}
    int cell() const noexcept { return cell_; }

private:
    int cell_;
};

/// Global factorization or solve failed.
class SolverFailure : public Error {
public:
    using Error::Error;
};

} // namespace xhdg
