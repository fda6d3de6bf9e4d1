// errors.hpp — exception types shared across the library
#pragma once

#include <stdexcept>
#include <string>

namespace nmq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bath / chain mapping
struct NonPositiveWeight : Error {
    using Error::Error;
};
struct RecurrenceBreakdown : Error {
    using Error::Error;
};

// gaussian dynamics
struct DimensionMismatch : Error {
    using Error::Error;
};
struct ModeCountTooLarge : Error {
    using Error::Error;
};

// tomography / spectral analysis
struct CPViolation : Error {
    using Error::Error;
};
struct SingularMap : Error {
    using Error::Error;
};
struct DegenerateFixedPoint : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct NonDiagonalizable : Error {
    using Error::Error;
};
struct ZeroTrace : Error {
    using Error::Error;
};

// pipeline
struct NotProductForm : Error {
    using Error::Error;
};
struct UnsupportedInteraction : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace nmq
