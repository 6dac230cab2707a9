#pragma once

#include <stdexcept>
#include <string>

namespace kltapprox {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain an operation accepts.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The frequency equation did not yield the expected number of roots.
class RootFindingError : public Error {
public:
    using Error::Error;
};

/// An integer function produced an entry outside {0, +-1, +-2, +-3}.
class OutOfAlphabet : public Error {
public:
    using Error::Error;
};

class AllZeroRow : public Error {
public:
    using Error::Error;
};

class SingularTransform : public Error {
public:
    using Error::Error;
};

class EmptySlice : public Error {
public:
    using Error::Error;
};

/// Checked fixed-width arithmetic left its declared word range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace kltapprox
