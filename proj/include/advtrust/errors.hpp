#pragma once

#include <stdexcept>
#include <string>

namespace advtrust {

// Base for all library errors so callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error("shape error: " + msg) {}
};

class LabelError : public Error {
public:
    explicit LabelError(const std::string& msg) : Error("label error: " + msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error("precondition error: " + msg) {}
};

// File/stream parsing failures; carries the byte offset where parsing stopped.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t offset)
        : Error("format error at byte " + std::to_string(offset) + ": " + msg), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class VersionError : public Error {
public:
    explicit VersionError(const std::string& msg) : Error("version error: " + msg) {}
};

class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(const std::string& msg, std::size_t epoch)
        : Error("training diverged at epoch " + std::to_string(epoch) + ": " + msg), epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error("numeric error: " + msg) {}
};

class BandError : public Error {
public:
    explicit BandError(const std::string& msg) : Error("band error: " + msg) {}
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& msg) : Error("budget error: " + msg) {}
};

class DegeneratePartitionError : public Error {
public:
    explicit DegeneratePartitionError(const std::string& msg)
        : Error("degenerate partition: " + msg) {}
};

// Raised when a metric is mathematically undefined for the given inputs
// (e.g. flagging accuracy with an empty non-trust cluster).
class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& msg) : Error("undefined metric: " + msg) {}
};

class FileError : public Error {
public:
    explicit FileError(const std::string& msg) : Error("file error: " + msg) {}
};

}  // namespace advtrust
