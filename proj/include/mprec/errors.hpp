#pragma once

#include <stdexcept>
#include <string>

namespace mprec {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

class IndexError : public Error {
public:
    explicit IndexError(const std::string& msg) : Error(msg) {}
};

/// A per-cell diagonal block failed the pivot-magnitude check.
class SingularBlockError : public Error {
public:
    SingularBlockError(int cell, const std::string& what_block)
        : Error("singular " + what_block + " block in cell " + std::to_string(cell)),
          cell_id(cell) {}
    int cell_id;
};

class ZeroPivotError : public Error {
public:
    explicit ZeroPivotError(int row)
        : Error("zero pivot in ILU(0) at row " + std::to_string(row)), row_id(row) {}
    int row_id;
};

/// Phase combination outside the supported G / OG / OWG states.
class UnsupportedStateError : public Error {
public:
    explicit UnsupportedStateError(const std::string& msg) : Error(msg) {}
};

class SetupError : public Error {
public:
    explicit SetupError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace mprec
