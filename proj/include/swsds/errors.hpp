#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace swsds {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DuplicateKeyError : public Error {
 public:
  explicit DuplicateKeyError(std::string key, const std::string& context = {})
      : Error("duplicate key \"" + key + "\"" + (context.empty() ? "" : " in " + context)),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// line is the 1-based file line when raised while loading, else 0.
class DimensionMismatchError : public Error {
 public:
  explicit DimensionMismatchError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace swsds
