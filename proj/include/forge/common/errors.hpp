#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace forge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : Error(what + ": " + path.string()), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

class InvalidPath : public Error {
 public:
  using Error::Error;
};

/// An operation was called with input its contract rejects.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace forge
