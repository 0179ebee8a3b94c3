#pragma once

#include <string>

namespace bgev {

/// Library version, e.g. "0.1.0".
const char* version();

/// Versions of the numerical dependencies compiled into the library.
std::string eigen_version();
std::string boost_version();

}  // namespace bgev
