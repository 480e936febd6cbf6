#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eigcount {

/// Failure categories raised by the library. Every throwing operation uses
/// `eigcount::Error` carrying one of these codes.
enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  SingularBlock,
  SingularMatrix,
  SingularFactor,
  SingularPrincipalSubmatrix,
  SingularSiteBlock,
  NotPositiveDefinite,
  InsufficientSpectralMass,
  SearchBudgetExceeded,
  NoAdmissibleShift,
  NormTooLarge,
  HoppingNormTooLarge,
  PerturbationTooLarge,
  PreconditionViolation,
  InsufficientPositivePoints,
  ConvergenceFailure,
  NumericalFailure,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularBlock: return "SingularBlock";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::SingularFactor: return "SingularFactor";
    case Errc::SingularPrincipalSubmatrix: return "SingularPrincipalSubmatrix";
    case Errc::SingularSiteBlock: return "SingularSiteBlock";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::InsufficientSpectralMass: return "InsufficientSpectralMass";
    case Errc::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case Errc::NoAdmissibleShift: return "NoAdmissibleShift";
    case Errc::NormTooLarge: return "NormTooLarge";
    case Errc::HoppingNormTooLarge: return "HoppingNormTooLarge";
    case Errc::PerturbationTooLarge: return "PerturbationTooLarge";
    case Errc::PreconditionViolation: return "PreconditionViolation";
    case Errc::InsufficientPositivePoints: return "InsufficientPositivePoints";
    case Errc::ConvergenceFailure: return "ConvergenceFailure";
    case Errc::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

namespace detail {
inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}
}  // namespace detail

}  // namespace eigcount
