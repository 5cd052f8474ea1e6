#pragma once

#include <charconv>
#include <string>

namespace nnls {

/// Shortest decimal that round-trips the double; used for all CSV output so
/// identical runs emit identical bytes.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace nnls
