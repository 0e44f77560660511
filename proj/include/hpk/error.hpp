#pragma once

#include <stdexcept>
#include <string>

namespace hpk {

// Base for every error raised by the kernel's host-level API.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fault raised while evaluating L code (bad index, division by zero,
// failed use-clause check, library precondition).
class RuntimeFault : public Error {
 public:
  using Error::Error;
};

// Store snapshot could not be written or read.
class StoreError : public Error {
 public:
  using Error::Error;
};

}  // namespace hpk
