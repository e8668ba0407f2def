#pragma once

#include <stdexcept>
#include <string>

namespace udnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

// Thrown when an infinite sum would need more terms than allowed.
class TruncationFailure : public Error {
public:
    TruncationFailure(const std::string& what, long required_cutoff)
        : Error(what), required_cutoff_(required_cutoff) {}
    long required_cutoff() const { return required_cutoff_; }

private:
    long required_cutoff_;
};

class NumericalInstability : public Error {
public:
    using Error::Error;
};

class ResourceLimit : public Error {
public:
    using Error::Error;
};

}  // namespace udnet
