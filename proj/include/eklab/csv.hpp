#pragma once

#include <string>

namespace eklab {

/// Locale-independent rendering with 17 significant digits, so every value
/// read back parses to the identical double. NaN prints as "nan".
std::string format_double(double v);

inline const char* format_bool(bool v) { return v ? "1" : "0"; }

}  // namespace eklab
