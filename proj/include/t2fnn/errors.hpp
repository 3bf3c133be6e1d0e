#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace t2fnn {

/// A parameter or structural invariant was violated (bad config, bad state).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration text. Carries the offending line and key.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::string key)
        : std::runtime_error("line " + std::to_string(line) + (key.empty() ? "" : " [" + key + "]") + ": " + message),
          line_(line), key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

/// An adaptation step produced NaN/Inf. Usually means the Euler step is too large.
class NonFiniteUpdate : public std::runtime_error {
public:
    explicit NonFiniteUpdate(const std::string& what_param)
        : std::runtime_error("non-finite parameter after update: " + what_param) {}
};

/// Plant output left the divergence sentinel.
class Diverged : public std::runtime_error {
public:
    Diverged(std::int64_t step, double value)
        : std::runtime_error("plant diverged at step " + std::to_string(step) + " (|y| = " + std::to_string(value) + ")"),
          step_(step), value_(value) {}

    std::int64_t step() const noexcept { return step_; }
    double value() const noexcept { return value_; }

private:
    std::int64_t step_;
    double value_;
};

class EmptySequence : public std::invalid_argument {
public:
    EmptySequence() : std::invalid_argument("empty sequence") {}
};

/// Wraps a failure inside one experiment run, tagging the run index.
class RunFailure : public std::runtime_error {
public:
    enum class Cause { diverged, non_finite, other };

    RunFailure(std::size_t run, const std::string& what_failed, Cause cause)
        : std::runtime_error("run " + std::to_string(run) + ": " + what_failed), run_(run), cause_(cause) {}

    std::size_t run() const noexcept { return run_; }
    Cause cause() const noexcept { return cause_; }

private:
    std::size_t run_;
    Cause cause_;
};

} // namespace t2fnn
