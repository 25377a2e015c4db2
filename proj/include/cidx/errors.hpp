#pragma once

#include <stdexcept>
#include <string>

namespace cidx {

enum class Errc {
  InvalidArgument,
  ShapeMismatch,
  BlockMismatch,
  NotAnAlgebra,
  NotUnital,
  NotSubalgebra,
  TraceNotFaithful,
  DegenerateModule,
  NotCentral,
  SearchDidNotConverge,
  InconsistentExtension,
  IndexNotScalar,
  DegeneratePerron,
  NotInBasicConstruction,
  DegenerateIntermediate,
  NotIntermediate,
  CorrespondenceViolation,
  SizeCapExceeded,
  NotASubgroup,
  VerificationFailed,
};

const char* to_string(Errc code) noexcept;

// Spec errors (malformed input) vs. numerical verification failures.
bool is_input_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cidx
