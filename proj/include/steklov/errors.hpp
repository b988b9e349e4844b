#pragma once

#include <stdexcept>

namespace steklov {

// Malformed or incomplete user input (missing field, bad line, unknown flag).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The data parses but cannot be solved as given: singular interior block,
// non-manifold mesh edge, degenerate generator parameters.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration requested beyond its cap.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A certificate cannot be built for the given eigenfield.
class CertificateAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace steklov
