#pragma once

#include <string>
#include <string_view>

namespace cloudsep {

// Arithmetic used for moment-matrix factorization. Moment matrices of
// degree beyond ~16 are too ill-conditioned for double precision, so the
// moment route can run in MPFR arithmetic with a configurable mantissa.
struct Precision {
  enum class Mode { automatic, double_precision, extended };

  Mode mode = Mode::automatic;
  unsigned bits = 0; // mantissa bits for `extended`; ignored otherwise

  static Precision automatic() { return {}; }
  static Precision double_precision() { return {Mode::double_precision, 53}; }
  static Precision extended(unsigned bits) { return {Mode::extended, bits}; }

  /// Accepts "auto", "double" or a bit count such as "512".
  static Precision parse(std::string_view text);
  std::string to_string() const;

  bool is_double() const { return mode == Mode::double_precision; }
};

} // namespace cloudsep
