#include "grail/format.hpp"

#include <cstdio>

namespace grail {

std::string format_double(double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace grail
