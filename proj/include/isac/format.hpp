// SPDX-License-Identifier: Apache-2.0
//
// Locale-independent, round-trip number formatting for CSV output.

#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace isac {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace isac
