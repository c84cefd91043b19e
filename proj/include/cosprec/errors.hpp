#pragma once

#include <stdexcept>
#include <string>

namespace cosprec {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct ZeroMatrix : Error {
    explicit ZeroMatrix(const std::string& msg) : Error(msg) {}
};

struct DegenerateProduct : Error {
    explicit DegenerateProduct(const std::string& msg) : Error(msg) {}
};

struct StepUndefined : Error {
    explicit StepUndefined(const std::string& msg) : Error(msg) {}
};

struct NotSymmetric : Error {
    explicit NotSymmetric(const std::string& msg) : Error(msg) {}
};

struct InvalidParam : Error {
    explicit InvalidParam(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

struct NotConverged : Error {
    explicit NotConverged(const std::string& msg) : Error(msg) {}
};

struct Breakdown : Error {
    explicit Breakdown(const std::string& msg) : Error(msg) {}
};

} // namespace cosprec
