#pragma once

#include <stdexcept>
#include <string>

namespace motx {

// Base class for everything thrown on purpose by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration, table or coefficient size went past a configured cap.
class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error(what) {}
};

// A truncated-field operation cannot guarantee a single correct digit of
// the result (typically catastrophic cancellation in a subtraction).
class PrecisionError : public Error {
public:
    explicit PrecisionError(const std::string& what) : Error(what) {}
};

// A character was applied to an argument of valuation below -depth.
// required_depth is the smallest depth that would have worked.
class DepthError : public Error {
public:
    DepthError(const std::string& what, int required_depth)
        : Error(what), required_depth(required_depth) {}
    int required_depth;
};

// Malformed input text (spec files, element literals, CLI point syntax).
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0, int col = 0)
        : Error(format(what, line, col)), line(line), col(col) {}
    int line;
    int col;

private:
    static std::string format(const std::string& what, int line, int col) {
        if (line <= 0) return what;
        return "line " + std::to_string(line) + ":" + std::to_string(col) + ": " + what;
    }
};

// A structurally valid expression could not be evaluated at a point
// (unresolved case, infinite valuation in integer arithmetic, ...).
class EvalError : public Error {
public:
    explicit EvalError(const std::string& what) : Error(what) {}
};

} // namespace motx
