#pragma once

#include <stdexcept>
#include <string>

namespace pdem {

// Base of every error raised by the solver library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mass profile non-positive, unordered breakpoints, malformed table.
class ProfileError : public Error {
public:
    using Error::Error;
};

class DiscretizationError : public Error {
public:
    using Error::Error;
};

// k = 0 on a slab or an integration point; the slab matrix and Gamma are singular there.
class TurningPointError : public Error {
public:
    using Error::Error;
};

class BoundaryKindError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class NoPropagatingChannelError : public Error {
public:
    using Error::Error;
};

// Operation requested on a classically forbidden (or otherwise invalid) interval.
class DomainError : public Error {
public:
    using Error::Error;
};

class TopologyError : public Error {
public:
    using Error::Error;
};

// Root not bracketed in the supplied range.
class SearchError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class DegenerateWavefunctionError : public Error {
public:
    using Error::Error;
};

} // namespace pdem
