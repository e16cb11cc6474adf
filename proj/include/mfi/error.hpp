#pragma once

#include <stdexcept>
#include <string>

namespace mfi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value does not hold.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// sigma vanishes (or omega/sigma^{-1} vanishes identically) on a rectangle,
/// so the bump quantities are degenerate.
class TrivialWeight : public Error {
public:
    using Error::Error;
};

/// The requested computation exceeds the size guard of an O(N^2) path.
class GuardExceeded : public Error {
public:
    using Error::Error;
};

/// A supremum was requested over an empty rectangle family.
class EmptyFamily : public Error {
public:
    using Error::Error;
};

}  // namespace mfi
