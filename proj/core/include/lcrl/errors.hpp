#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcrl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    SyntaxError(std::size_t position, std::string expected, const std::string& detail)
        : Error("syntax error at position " + std::to_string(position) + ": expected " +
                expected + (detail.empty() ? "" : " (" + detail + ")")),
          position(position),
          expected(std::move(expected)) {}
    std::size_t position;
    std::string expected;
};

struct UnknownAtomError : Error {
    explicit UnknownAtomError(std::string atom)
        : Error("unknown atom '" + atom + "' (not in declared alphabet)"), atom(std::move(atom)) {}
    std::string atom;
};

struct InvalidLengthError : Error {
    using Error::Error;
};

struct FormatError : Error {
    FormatError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

struct NotLimitDeterministicError : Error {
    using Error::Error;
};

struct AcceptanceOutsideQDError : Error {
    using Error::Error;
};

struct EpsilonInAcceptingError : Error {
    using Error::Error;
};

struct UnsupportedFragmentError : Error {
    explicit UnsupportedFragmentError(const std::string& subformula)
        : Error("unsupported fragment: " + subformula), subformula(subformula) {}
    std::string subformula;
};

struct UnknownNameError : Error {
    using Error::Error;
};

struct InvalidActionError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(std::string field, const std::string& what)
        : Error("config field '" + field + "': " + what), field(std::move(field)) {}
    std::string field;
};

struct TooLargeError : Error {
    using Error::Error;
};

struct NotEnumerableError : Error {
    using Error::Error;
};

struct NonConvergenceError : Error {
    using Error::Error;
};

struct MismatchedFixtureError : Error {
    using Error::Error;
};

}  // namespace lcrl
