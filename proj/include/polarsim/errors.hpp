#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polarsim {

// Base for every error the engine raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ObserverCannotRespond : public Error {
 public:
  using Error::Error;
};

// Raised by a backend once its retry policy is exhausted.
class BackendFailure : public Error {
 public:
  using Error::Error;
};

// The model kept returning whitespace-only text.
class EmptyCompletion : public BackendFailure {
 public:
  using BackendFailure::BackendFailure;
};

class NoIntegerFound : public Error {
 public:
  using Error::Error;
};

class UnparsableAnswer : public Error {
 public:
  UnparsableAnswer(std::string item_id, const std::string& what)
      : Error(what), item_id_(std::move(item_id)) {}
  const std::string& item_id() const { return item_id_; }

 private:
  std::string item_id_;
};

class KeyMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

class NoParticipants : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class CorruptLine : public Error {
 public:
  CorruptLine(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace polarsim
