#pragma once

#include <stdexcept>
#include <string>

namespace emgcs {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Signal shorter than an extractor's minimum length.
struct TooShortError : Error {
    using Error::Error;
};

// Signal contains NaN/Inf or is empty.
struct InvalidSignalError : Error {
    using Error::Error;
};

// Zero-variance (or otherwise singular) input to a model fit.
struct DegenerateSignalError : Error {
    using Error::Error;
};

struct IncompleteBundleError : Error {
    using Error::Error;
};

struct InsufficientSubjectsError : Error {
    using Error::Error;
};

// Too many missing cells to keep a sample.
struct UnusableSampleError : Error {
    using Error::Error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct LabelError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct MissingTraceError : Error {
    using Error::Error;
};

struct ChecksumError : Error {
    using Error::Error;
};

struct VersionError : Error {
    using Error::Error;
};

struct UndefinedMetricError : Error {
    using Error::Error;
};

}  // namespace emgcs
