#pragma once

#include <stdexcept>
#include <string>

namespace hinfobs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonvanishingOrigin : Error {
    using Error::Error;
};

struct EmptyRegion : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct LambdaOutOfRange : Error {
    using Error::Error;
};

struct NonpositiveWeight : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

struct ZeroDisturbance : Error {
    using Error::Error;
};

struct NonFiniteState : Error {
    using Error::Error;
};

struct InfeasibleError : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

} // namespace hinfobs
