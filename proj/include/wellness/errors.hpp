#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wellness {

// Base class for all engine errors. CLI maps these to exit code 1,
// config/usage problems to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::uint64_t line_no, const std::string& reason)
        : Error("malformed record at line " + std::to_string(line_no) + ": " + reason),
          line_no(line_no),
          reason(reason) {}
    std::uint64_t line_no;
    std::string reason;
};

class NonMonotonicFrame : public Error {
public:
    explicit NonMonotonicFrame(std::uint64_t line_no)
        : Error("frame_index regressed at line " + std::to_string(line_no)), line_no(line_no) {}
    std::uint64_t line_no;
};

class InsufficientPose : public Error {
public:
    explicit InsufficientPose(const std::string& msg) : Error(msg) {}
};

class NoLabels : public Error {
public:
    NoLabels() : Error("no labeled instances supplied") {}
};

class LengthMismatch : public Error {
public:
    explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

class TooShort : public Error {
public:
    explicit TooShort(const std::string& msg) : Error(msg) {}
};

class DanglingReference : public Error {
public:
    explicit DanglingReference(const std::string& id)
        : Error("reference to unknown id '" + id + "'") {}
};

class PersonNotFound : public Error {
public:
    explicit PersonNotFound(const std::string& id)
        : Error("person '" + id + "' not present in graph") {}
};

class DateMismatch : public Error {
public:
    explicit DateMismatch(const std::string& msg) : Error(msg) {}
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& msg) : Error("invalid scenario spec: " + msg) {}
};

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace wellness
