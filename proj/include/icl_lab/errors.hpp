#pragma once

#include <stdexcept>
#include <string>

namespace icl_lab {

// Base of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class MissingContextError : public Error {
 public:
  using Error::Error;
};

class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace icl_lab
