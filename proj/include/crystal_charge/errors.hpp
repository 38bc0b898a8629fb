#pragma once

#include <stdexcept>
#include <string>

namespace crystal_charge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector length or ambient dimension disagrees with what the call expects.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed argument: duplicate or out-of-range direction index, bad size.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// No charge function recipe exists for this dimension (even n >= 6).
class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

/// A box set violates the melting rule.
class InvalidPartition : public Error {
public:
    using Error::Error;
};

/// Two addable/removable positions project onto the same charge.
class ProjectionCollision : public Error {
public:
    using Error::Error;
};

/// A weight system maps two distinct charges to the same value.
class WeightCollision : public Error {
public:
    using Error::Error;
};

} // namespace crystal_charge
