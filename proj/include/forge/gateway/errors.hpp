#pragma once

#include <string>

#include "forge/common/errors.hpp"

namespace forge::gateway {

/// One failed provider call. status is the HTTP status, or 0 for a
/// transport failure.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, int status, bool retryable)
      : Error(what), status_(status), retryable_(retryable) {}

  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int status_;
  bool retryable_;
};

/// Transport errors, 429 and 5xx are retried; every other 4xx is final.
bool is_retryable_status(int status);

class ExhaustedRetries : public Error {
 public:
  ExhaustedRetries(int attempts, std::string last_error)
      : Error("gave up after " + std::to_string(attempts) + " attempts: " + last_error),
        attempts_(attempts),
        last_error_(std::move(last_error)) {}

  int attempts() const noexcept { return attempts_; }
  const std::string& last_error() const noexcept { return last_error_; }

 private:
  int attempts_;
  std::string last_error_;
};

class AuthMissing : public Error {
 public:
  using Error::Error;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

}  // namespace forge::gateway
