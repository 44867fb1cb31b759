#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace planrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Position in a source text; line and column are 1-based.
struct SourceLocation {
  std::string file = "<input>";
  std::size_t line = 0;
  std::size_t column = 0;

  std::string str() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(column);
  }
};

class LocatedError : public Error {
 public:
  LocatedError(SourceLocation where, const std::string& message)
      : Error(where.str() + ": " + message), where_(std::move(where)), message_(message) {}

  const SourceLocation& where() const noexcept { return where_; }
  const std::string& message() const noexcept { return message_; }

 private:
  SourceLocation where_;
  std::string message_;
};

class SyntaxError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

// A PDDL construct outside the supported subset.
class UnsupportedFeatureError : public LocatedError {
 public:
  UnsupportedFeatureError(SourceLocation where, std::string feature)
      : LocatedError(std::move(where), "unsupported feature '" + feature + "'"),
        feature_(std::move(feature)) {}

  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

class SemanticError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

class GroundingError : public Error {
 public:
  using Error::Error;
};

class InapplicableActionError : public Error {
 public:
  InapplicableActionError(std::size_t index, const std::string& action)
      : Error("action " + action + " at index " + std::to_string(index) +
              " is not applicable"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class UnsolvableError : public Error {
 public:
  using Error::Error;
};

}  // namespace planrec
