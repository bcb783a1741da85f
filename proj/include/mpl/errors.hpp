#pragma once

#include <stdexcept>
#include <string>

namespace mpl {

enum class Errc {
  // input / data problems (CLI exit code 2)
  InvalidInput,
  DuplicateCell,
  NonPositiveRecord,
  TooFewPeriods,
  EmptyBasket,
  DimensionMismatch,
  ShapeMismatch,
  LengthMismatch,
  OutOfRange,
  StaleEstimate,
  // numerical / rank problems (CLI exit code 3)
  SingularBlock,
  DegenerateResiduals,
  SingularKernel,
  SingularNormalEquations,
  ZeroDenominator,
  AllWeightsZero,
  DegenerateNorm,
  RankDeficientDesign,
  // anything else (CLI exit code 4)
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::DuplicateCell: return "DuplicateCell";
    case Errc::NonPositiveRecord: return "NonPositiveRecord";
    case Errc::TooFewPeriods: return "TooFewPeriods";
    case Errc::EmptyBasket: return "EmptyBasket";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::StaleEstimate: return "StaleEstimate";
    case Errc::SingularBlock: return "SingularBlock";
    case Errc::DegenerateResiduals: return "DegenerateResiduals";
    case Errc::SingularKernel: return "SingularKernel";
    case Errc::SingularNormalEquations: return "SingularNormalEquations";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::AllWeightsZero: return "AllWeightsZero";
    case Errc::DegenerateNorm: return "DegenerateNorm";
    case Errc::RankDeficientDesign: return "RankDeficientDesign";
    case Errc::Internal: return "Internal";
  }
  return "Unknown";
}

// CLI exit code convention: 2 input, 3 singular/numerical, 4 internal.
inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::InvalidInput:
    case Errc::DuplicateCell:
    case Errc::NonPositiveRecord:
    case Errc::TooFewPeriods:
    case Errc::EmptyBasket:
    case Errc::DimensionMismatch:
    case Errc::ShapeMismatch:
    case Errc::LengthMismatch:
    case Errc::OutOfRange:
    case Errc::StaleEstimate:
      return 2;
    case Errc::SingularBlock:
    case Errc::DegenerateResiduals:
    case Errc::SingularKernel:
    case Errc::SingularNormalEquations:
    case Errc::ZeroDenominator:
    case Errc::AllWeightsZero:
    case Errc::DegenerateNorm:
    case Errc::RankDeficientDesign:
      return 3;
    case Errc::Internal:
      return 4;
  }
  return 4;
}

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace mpl
