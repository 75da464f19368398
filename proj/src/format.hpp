#ifndef VLAB_SRC_FORMAT_HPP
#define VLAB_SRC_FORMAT_HPP

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace vlab::detail {

/// Decimal text with `digits` significant digits; "NaN" for NaN.
inline std::string format_number(double v, int digits = 12) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// v rounded to `digits` significant digits, so JSON serializers print the
/// short form.
inline double round_significant(double v, int digits = 12) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

}  // namespace vlab::detail

#endif  // VLAB_SRC_FORMAT_HPP
