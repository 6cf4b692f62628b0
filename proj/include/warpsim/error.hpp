#pragma once

#include <stdexcept>
#include <string>

namespace warpsim {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid arguments, malformed programs, bad config files.
struct DomainError : Error {
    using Error::Error;
};

// Launch/dispatch planning failures (grid limits, capacity misuse).
struct PlanError : Error {
    using Error::Error;
};

// A lane hit a runtime fault (division by zero, log of a non-positive
// value, out-of-bounds access). Aborts the whole simulation.
struct FaultError : Error {
    using Error::Error;
};

// Kernel text that does not parse.
struct ParseError : Error {
    using Error::Error;
};

// Post-hoc analysis rejected its input (e.g. a non-monotone cost curve).
struct AnalysisError : Error {
    using Error::Error;
};

}  // namespace warpsim
