#pragma once

// MPFR-backed real type used by the extended-precision moment route.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cloudsep::detail {

using mpreal = boost::multiprecision::mpfr_float;

// Sets the default MPFR precision for values created inside the scope.
class PrecisionScope {
public:
  explicit PrecisionScope(unsigned bits)
      : saved_(mpreal::default_precision()) {
    mpreal::default_precision(digits10_for(bits));
  }
  ~PrecisionScope() { mpreal::default_precision(saved_); }
  PrecisionScope(const PrecisionScope &) = delete;
  PrecisionScope &operator=(const PrecisionScope &) = delete;

  static unsigned digits10_for(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
  }

private:
  unsigned saved_;
};

inline double to_double(double x) { return x; }
inline double to_double(const mpreal &x) { return x.convert_to<double>(); }

// Starting mantissa for factorizing a degree-n moment matrix whose support
// lies in |z| <= radius: the Gram entries span radius^(2n) in magnitude and
// the factorization cancels about that many bits, plus headroom.
inline unsigned auto_bits(int n, double radius) {
  const double span = 2.0 * (n + 1) * std::log2(std::max(2.0, radius));
  return 128u + static_cast<unsigned>(std::ceil(span));
}

template <class T> T pi_of() {
  if constexpr (std::is_same_v<T, double>)
    return std::numbers::pi;
  else
    return boost::math::constants::pi<T>();
}

} // namespace cloudsep::detail
