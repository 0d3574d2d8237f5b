#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wvpanel {

// Base of all library errors. DataError covers malformed or inconsistent
// inputs; NumericError covers conditioning and stability failures detected
// at run time. The CLI maps the two branches to distinct exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct ParseError : DataError {
    ParseError(const std::string& what, std::size_t line_no)
        : DataError("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
    std::size_t line;
};

struct MissingBenchmark : DataError {
    using DataError::DataError;
};

struct EmptyEntity : DataError {
    using DataError::DataError;
};

struct NoOverlap : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

struct ShapeMismatch : DataError {
    using DataError::DataError;
};

struct InvalidSpec : DataError {
    using DataError::DataError;
};

struct InvalidAlpha : DataError {
    using DataError::DataError;
};

struct TooFewQuotes : DataError {
    using DataError::DataError;
};

struct SingularDesign : NumericError {
    explicit SingularDesign(double condition)
        : NumericError("design matrix singular or near-singular, condition number " +
                       std::to_string(condition)),
          condition_number(condition) {}
    double condition_number;
};

struct ZeroVariance : NumericError {
    using NumericError::NumericError;
};

struct GridTooCoarse : NumericError {
    using NumericError::NumericError;
};

struct UnstableStep : NumericError {
    using NumericError::NumericError;
};

}  // namespace wvpanel
