#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace snn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid network, partition, or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A caller broke a documented precondition (e.g. evolving backwards in time).
class ContractError : public Error {
public:
    using Error::Error;
};

class EncodingError : public Error {
public:
    using Error::Error;
};

class FramingError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Transport failure while talking to a specific peer rank.
class ExchangeError : public Error {
public:
    ExchangeError(int peer, const std::string& what)
        : Error("exchange with rank " + std::to_string(peer) + " failed: " + what), peer_(peer) {}

    int peer() const noexcept { return peer_; }

private:
    int peer_;
};

class BarrierError : public Error {
public:
    using Error::Error;
};

/// Error raised inside the simulation loop, tagged with the step it happened on.
class StepError : public Error {
public:
    StepError(std::uint64_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    std::uint64_t step() const noexcept { return step_; }

private:
    std::uint64_t step_;
};

/// Malformed input file; line is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EnergyError : public Error {
public:
    using Error::Error;
};

}  // namespace snn
