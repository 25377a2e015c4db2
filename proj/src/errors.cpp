#include "cidx/errors.hpp"

namespace cidx {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::BlockMismatch: return "BlockMismatch";
    case Errc::NotAnAlgebra: return "NotAnAlgebra";
    case Errc::NotUnital: return "NotUnital";
    case Errc::NotSubalgebra: return "NotSubalgebra";
    case Errc::TraceNotFaithful: return "TraceNotFaithful";
    case Errc::DegenerateModule: return "DegenerateModule";
    case Errc::NotCentral: return "NotCentral";
    case Errc::SearchDidNotConverge: return "SearchDidNotConverge";
    case Errc::InconsistentExtension: return "InconsistentExtension";
    case Errc::IndexNotScalar: return "IndexNotScalar";
    case Errc::DegeneratePerron: return "DegeneratePerron";
    case Errc::NotInBasicConstruction: return "NotInBasicConstruction";
    case Errc::DegenerateIntermediate: return "DegenerateIntermediate";
    case Errc::NotIntermediate: return "NotIntermediate";
    case Errc::CorrespondenceViolation: return "CorrespondenceViolation";
    case Errc::SizeCapExceeded: return "SizeCapExceeded";
    case Errc::NotASubgroup: return "NotASubgroup";
    case Errc::VerificationFailed: return "VerificationFailed";
  }
  return "Unknown";
}

bool is_input_error(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::ShapeMismatch:
    case Errc::BlockMismatch:
    case Errc::NotASubgroup:
    case Errc::NotIntermediate:
    case Errc::NotSubalgebra:
    case Errc::SizeCapExceeded:
      return true;
    default:
      return false;
  }
}

}  // namespace cidx
