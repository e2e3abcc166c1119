#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace paraicl {

// Base class of every error the engine raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- core ----
class AllZeroWeights : public Error {
 public:
  using Error::Error;
};
class EmptyDistribution : public Error {
 public:
  using Error::Error;
};
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// ---- embedding ----
class EmptyText : public Error {
 public:
  using Error::Error;
};
class DimMismatch : public Error {
 public:
  using Error::Error;
};
class ZeroVector : public Error {
 public:
  using Error::Error;
};

// ---- remote clients ----
class RemoteUnavailable : public Error {
 public:
  explicit RemoteUnavailable(const std::string& what,
                             std::optional<int> retry_after_ms = std::nullopt)
      : Error(what), retry_after_ms(retry_after_ms) {}
  std::optional<int> retry_after_ms;
};
class MalformedResponse : public Error {
 public:
  using Error::Error;
};
class AuthError : public Error {
 public:
  using Error::Error;
};
class ContextTooLong : public Error {
 public:
  using Error::Error;
};
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// ---- batching ----
class TemplateError : public Error {
 public:
  using Error::Error;
};

// ---- lm_backend ----
class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

// ---- harness ----
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line(line) {}
  int line;
};
class MissingField : public Error {
 public:
  MissingField(int line, const std::string& field)
      : Error("line " + std::to_string(line) + ": missing field '" + field + "'"),
        line(line),
        field(field) {}
  int line;
  std::string field;
};
class PoolTooSmall : public Error {
 public:
  using Error::Error;
};
class NoAnswerFound : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace paraicl
