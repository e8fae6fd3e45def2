#include "tou/errors.hpp"

namespace tou {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Range: return "range";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::NonpositiveThreshold: return "nonpositive_threshold";
    case ErrorKind::SingularFit: return "singular_fit";
    case ErrorKind::UndefinedCorrelation: return "undefined_correlation";
    case ErrorKind::DegenerateCopula: return "degenerate_copula";
    case ErrorKind::UnsupportedSide: return "unsupported_side";
    case ErrorKind::IndeterminateDomination: return "indeterminate_domination";
    case ErrorKind::InvalidParameter: return "invalid_parameter";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::EmptyInput: return "empty_input";
    case ErrorKind::Io: return "io";
  }
  return "?";
}

}  // namespace tou
