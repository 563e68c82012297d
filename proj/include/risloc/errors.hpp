#pragma once

#include <stdexcept>
#include <string>

namespace risloc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coincident points, collinear bearings, or any geometry with no unique answer.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Invalid scene or experiment configuration (including far-field violations).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Fewer matched channel soundings than the ratio construction needs.
class InsufficientSoundings : public Error {
 public:
  using Error::Error;
};

/// Ratio matrix with no usable signal subspace, or one that fills the whole space.
class DegenerateSubspace : public Error {
 public:
  using Error::Error;
};

/// Not enough reference bearings to pin down a 3-D position.
class Underdetermined : public Error {
 public:
  using Error::Error;
};

}  // namespace risloc
