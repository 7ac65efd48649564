#include "cloudsep/precision.hpp"

#include "cloudsep/errors.hpp"

#include <charconv>

namespace cloudsep {

Precision Precision::parse(std::string_view text) {
  if (text == "auto" || text.empty())
    return automatic();
  if (text == "double")
    return double_precision();
  unsigned bits = 0;
  const auto *end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, bits);
  if (ec != std::errc() || ptr != end || bits < 64 || bits > 65536)
    throw Error(ErrorKind::InvalidInput,
                "precision must be 'auto', 'double' or a bit count in [64, 65536], got '" +
                    std::string(text) + "'");
  return extended(bits);
}

std::string Precision::to_string() const {
  switch (mode) {
  case Mode::automatic: return "auto";
  case Mode::double_precision: return "double";
  case Mode::extended: return std::to_string(bits);
  }
  return "auto";
}

} // namespace cloudsep
