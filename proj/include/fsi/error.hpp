#pragma once

#include <stdexcept>
#include <string>

namespace fsi {

/// Base class of every error thrown by the library. `kind()` is a stable
/// machine-readable token used by the CLI error line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class MeshMismatch : public Error {
 public:
  explicit MeshMismatch(const std::string& what) : Error("mesh-mismatch", what) {}
};

class SingularMap : public Error {
 public:
  explicit SingularMap(const std::string& what) : Error("singular-map", what) {}
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(const std::string& what) : Error("singular-matrix", what) {}
};

class SizeError : public Error {
 public:
  explicit SizeError(const std::string& what) : Error("size", what) {}
};

class ParseError : public Error {
 public:
  ParseError(std::string key, const std::string& what)
      : Error("parse", key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace fsi
