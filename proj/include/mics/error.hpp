#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "mics/types.hpp"

namespace mics {

/// Error classes map one-to-one onto CLI exit codes.
enum class ErrorClass {
  Input = 2,     // unreadable or malformed input
  Contract = 3,  // well-formed input that violates an operation's precondition
  Internal = 4,  // a library invariant did not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::Input, "IoError", what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string reason)
      : Error(ErrorClass::Input, "ParseError",
              "line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class EmptyTrace : public Error {
 public:
  explicit EmptyTrace(const std::string& what = "trace has no samples")
      : Error(ErrorClass::Input, "EmptyTrace", what) {}
};

class SampleExceedsWcetHi : public Error {
 public:
  SampleExceedsWcetHi(std::size_t index, Micros value, Micros wcet_hi)
      : Error(ErrorClass::Contract, "SampleExceedsWcetHi",
              "sample #" + std::to_string(index) + " = " + std::to_string(value) +
                  " us exceeds wcet_hi = " + std::to_string(wcet_hi) + " us"),
        index_(index),
        value_(value) {}

  std::size_t index() const noexcept { return index_; }
  Micros value() const noexcept { return value_; }

 private:
  std::size_t index_;
  Micros value_;
};

class TooFewSamples : public Error {
 public:
  explicit TooFewSamples(const std::string& what)
      : Error(ErrorClass::Contract, "TooFewSamples", what) {}
};

class OutOfRange : public Error {
 public:
  OutOfRange(Micros t, const std::string& what)
      : Error(ErrorClass::Contract, "OutOfRange", "t = " + std::to_string(t) + " us: " + what),
        t_(t) {}

  Micros t() const noexcept { return t_; }

 private:
  Micros t_;
};

class InfeasibleHcLoad : public Error {
 public:
  explicit InfeasibleHcLoad(const std::string& what)
      : Error(ErrorClass::Contract, "InfeasibleHcLoad", what) {}
};

class MissingDistribution : public Error {
 public:
  explicit MissingDistribution(const std::string& task_id)
      : Error(ErrorClass::Contract, "MissingDistribution",
              "task '" + task_id + "' has no execution-time distribution"),
        task_id_(task_id) {}

  const std::string& task_id() const noexcept { return task_id_; }

 private:
  std::string task_id_;
};

class HyperperiodOverflow : public Error {
 public:
  explicit HyperperiodOverflow(const std::string& what)
      : Error(ErrorClass::Contract, "HyperperiodOverflow", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorClass::Contract, "ConfigError", what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorClass::Internal, "InvariantViolation", what) {}
};

}  // namespace mics
