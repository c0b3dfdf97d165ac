#pragma once

#include <string_view>

namespace dtc {

inline constexpr std::string_view kToolVersion = "dtc 0.1.0";

}  // namespace dtc
