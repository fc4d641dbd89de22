#pragma once

#include <stdexcept>
#include <string>

namespace stiffjnd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument to a rendering or observer call.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Operation called in the wrong staircase phase (update after termination,
/// JND before termination).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Every sample of an exploration stayed within one encoder quantum of
/// neutral, so no stiffness slope can be estimated.
class DegenerateExplorationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace stiffjnd
