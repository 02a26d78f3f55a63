#pragma once

#include <stdexcept>
#include <string>

namespace bandframe {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// h >= 2*omega: a single generator suffices, the multi-channel theory does not apply.
class DegenerateRegime : public Error {
public:
    using Error::Error;
};

/// Requested N exceeds what the small dense kernels support.
class UnsupportedArity : public Error {
public:
    using Error::Error;
};

/// A fiber abscissa fell on a sub-interval breakpoint.
class BoundaryAmbiguous : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

class NotFrame : public Error {
public:
    using Error::Error;
};

class NotRiesz : public Error {
public:
    using Error::Error;
};

/// A fiber does not have the rank its sub-interval prescribes.
class SingularFiber : public Error {
public:
    using Error::Error;
};

/// Scheme requested outside the h-range its formulas cover.
class InadmissibleRegime : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class NotBreakpointAligned : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace bandframe
