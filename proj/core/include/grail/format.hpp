#pragma once

#include <string>

namespace grail {

// Shortest-ish decimal form used in every CSV the lab writes ("%.12g").
// Stable across runs, so byte-identical output checks are meaningful.
std::string format_double(double value);

}  // namespace grail
