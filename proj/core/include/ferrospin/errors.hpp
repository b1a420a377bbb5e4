#pragma once

#include <stdexcept>
#include <string>

namespace ferrospin {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input or parameters outside their domain.
class InputError : public Error {
public:
    using Error::Error;
};

// Parameters outside the regime an operation is defined for.
class RegimeError : public Error {
public:
    using Error::Error;
};

// An exact or enumerative computation would exceed its size cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// The monotone coupling produced an unordered pair.
class CouplingError : public Error {
public:
    using Error::Error;
};

} // namespace ferrospin
