#pragma once

#include <array>
#include <charconv>
#include <string>

namespace resid_edf {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

}  // namespace resid_edf
