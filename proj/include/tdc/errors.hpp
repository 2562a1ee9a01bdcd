#pragma once

#include <stdexcept>
#include <string>

namespace tdc {

// Base for all data-dependent failures (bad input, truncated streams, ...).
// Contract violations (caller bugs) throw ContractError instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

class StreamExhausted : public Error {
public:
    explicit StreamExhausted(const std::string& what) : Error(what) {}
};

class MalformedData : public Error {
public:
    explicit MalformedData(const std::string& what) : Error(what) {}
};

class CrcMismatch : public Error {
public:
    explicit CrcMismatch(const std::string& what) : Error(what) {}
};

class VersionMismatch : public Error {
public:
    explicit VersionMismatch(const std::string& what) : Error(what) {}
};

} // namespace tdc
