#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cloudsep {

enum class ErrorKind {
  InvalidInput,
  EmptyMeasure,
  QuadratureFailure,
  NotAMomentMatrix,
  RankDeficient,
  DegreeOutOfRange,
  InfiniteChristoffel,
  NoConvergence,
  CentroidUndefined,
  OutsideDomainRequired,
  FitIllConditioned,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library. `detail` carries the one number
// that callers usually want for diagnostics: the achieved tolerance for
// QuadratureFailure, the rank for RankDeficient, the condition estimate for
// FitIllConditioned. NaN otherwise.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message,
        double detail = std::numeric_limits<double>::quiet_NaN());

  ErrorKind kind() const noexcept { return kind_; }
  double detail() const noexcept { return detail_; }

private:
  ErrorKind kind_;
  double detail_;
};

} // namespace cloudsep
