#pragma once

#include <stdexcept>
#include <string>

namespace hsiseg {

/// Base for errors raised while reading or validating external data.
/// Contract violations on in-memory arguments use std::invalid_argument and
/// std::out_of_range instead.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unsupported raster file / header.
class FormatError : public Error {
  public:
    using Error::Error;
};

}  // namespace hsiseg
