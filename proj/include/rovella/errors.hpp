#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rovella {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flow parameters violate one of the eigenvalue / expansion inequalities.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A point lies outside the domain of the requested map or operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The point sits on the singular line and never leaves the linear box.
class InfiniteTimeError : public Error {
public:
    using Error::Error;
};

class SingularDerivativeError : public Error {
public:
    using Error::Error;
};

/// The map lacks the branch structure an algorithm needs (e.g. full branches).
class StructureError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_gap)
        : Error(what), last_gap_(last_gap) {}
    double last_gap() const noexcept { return last_gap_; }

private:
    double last_gap_;
};

class RangeError : public Error {
public:
    using Error::Error;
};

/// An orbit came closer to the singular line than the simulation cutoff.
class NearSingularityError : public Error {
public:
    NearSingularityError(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class BracketError : public Error {
public:
    using Error::Error;
};

/// Two independent routes to the same quantity disagree.
class InconsistencyError : public Error {
public:
    InconsistencyError(const std::string& what, double first, double second)
        : Error(what), first_(first), second_(second) {}
    double first() const noexcept { return first_; }
    double second() const noexcept { return second_; }

private:
    double first_;
    double second_;
};

class IntegrabilityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace rovella
