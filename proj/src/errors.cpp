#include "cloudsep/errors.hpp"

namespace cloudsep {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::InvalidInput: return "InvalidInput";
  case ErrorKind::EmptyMeasure: return "EmptyMeasure";
  case ErrorKind::QuadratureFailure: return "QuadratureFailure";
  case ErrorKind::NotAMomentMatrix: return "NotAMomentMatrix";
  case ErrorKind::RankDeficient: return "RankDeficient";
  case ErrorKind::DegreeOutOfRange: return "DegreeOutOfRange";
  case ErrorKind::InfiniteChristoffel: return "InfiniteChristoffel";
  case ErrorKind::NoConvergence: return "NoConvergence";
  case ErrorKind::CentroidUndefined: return "CentroidUndefined";
  case ErrorKind::OutsideDomainRequired: return "OutsideDomainRequired";
  case ErrorKind::FitIllConditioned: return "FitIllConditioned";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &message, double detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind), detail_(detail) {}

} // namespace cloudsep
