#pragma once

#include <stdexcept>
#include <string>

namespace kalspan {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called outside its documented domain.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// A refinement oracle could not reach the requested width within its level budget.
class OracleFailure : public Error {
public:
    using Error::Error;
};

class RadicandMismatch : public Error {
public:
    using Error::Error;
};

class DependentRows : public Error {
public:
    using Error::Error;
};

class InexactEntries : public Error {
public:
    using Error::Error;
};

/// A scan or enumeration would exceed its configured budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A certified decision was not reachable at the available refinement.
class Undecided : public Error {
public:
    using Error::Error;
};

class IndexOutOfFamily : public Error {
public:
    using Error::Error;
};

class NotInClosure : public Error {
public:
    using Error::Error;
};

class InsufficientQuorum : public Error {
public:
    using Error::Error;
};

class NotRepresentable : public Error {
public:
    using Error::Error;
};

/// Two independent computations of the same mathematical fact disagreed.
/// Always an implementation bug.
class Inconsistency : public Error {
public:
    using Error::Error;
};

/// Malformed job or certificate document. `where` names the offending position.
class InputError : public Error {
public:
    InputError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace kalspan
