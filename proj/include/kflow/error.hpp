#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where the quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoHorizonError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double lo, double hi)
      : Error(what + " (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        bracket_lo(lo),
        bracket_hi(hi) {}

  double bracket_lo;
  double bracket_hi;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::vector<std::string> paths = {})
      : Error(what), offending_paths(std::move(paths)) {}

  std::vector<std::string> offending_paths;
};

/// The mean curvature is non-positive somewhere; carries the offending nodes.
class MeanConvexityError : public Error {
 public:
  MeanConvexityError(const std::string& what, std::vector<std::size_t> nodes)
      : Error(what), nodes(std::move(nodes)) {}

  std::vector<std::size_t> nodes;
};

class NonRepresentableGraphError : public Error {
 public:
  using Error::Error;
};

class DecayViolationError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace kflow
