#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace writor {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied input that violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Optimistic-concurrency failure: the stored revision moved underneath us.
class ConflictError : public Error {
 public:
  using Error::Error;
};

// Anything that originates from the model provider side.
class ProviderError : public Error {
 public:
  using Error::Error;
};

class TransportError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class ReplayMissError : public ProviderError {
 public:
  ReplayMissError(std::string stage, std::string fingerprint)
      : ProviderError("replay miss: no transcript entry for stage '" + stage +
                      "' with fingerprint " + fingerprint),
        stage_(std::move(stage)),
        fingerprint_(std::move(fingerprint)) {}

  const std::string& stage() const { return stage_; }
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string stage_;
  std::string fingerprint_;
};

// Raw provider text holds no parseable JSON object.
class MalformedOutputError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class SchemaError : public ProviderError {
 public:
  SchemaError(std::string stage, std::vector<std::string> paths)
      : ProviderError(build_message(stage, paths)), paths_(std::move(paths)) {}

  const std::vector<std::string>& paths() const { return paths_; }

 private:
  static std::string build_message(const std::string& stage,
                                   const std::vector<std::string>& paths);
  std::vector<std::string> paths_;
};

// A pipeline stage gave up after exhausting repairs.
class StageError : public ProviderError {
 public:
  StageError(std::string stage, std::string message,
             std::vector<std::string> raw_responses = {})
      : ProviderError("stage '" + stage + "' failed: " + message),
        stage_(std::move(stage)),
        raw_responses_(std::move(raw_responses)) {}

  const std::string& stage() const { return stage_; }
  const std::vector<std::string>& raw_responses() const {
    return raw_responses_;
  }

 private:
  std::string stage_;
  std::vector<std::string> raw_responses_;
};

}  // namespace writor
