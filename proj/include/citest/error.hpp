#pragma once

#include <stdexcept>
#include <string>

namespace citest {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands have incompatible shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An estimator was asked to run on fewer observations than it needs.
class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

/// A point fell outside the declared support of a partition.
class OutOfSupportError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure did not reach the requested accuracy.
class ToleranceError : public Error {
public:
    using Error::Error;
};

/// A parameter set violates a construction constraint (e.g. negative density).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Requested dimension is outside what the procedure supports.
class UnsupportedDimensionError : public Error {
public:
    using Error::Error;
};

/// Test configuration is inconsistent with itself or with the data.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data; carries a 1-based row/column position when known.
class DataError : public Error {
public:
    DataError(const std::string& what, long row = -1, long column = -1)
        : Error(format(what, row, column)), row_(row), column_(column) {}

    long row() const noexcept { return row_; }
    long column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, long row, long column) {
        if (row < 0) return what;
        std::string s = "row " + std::to_string(row);
        if (column >= 0) s += ", column " + std::to_string(column);
        return s + ": " + what;
    }

    long row_;
    long column_;
};

}  // namespace citest
