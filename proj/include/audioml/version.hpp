#pragma once

namespace audioml {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace audioml
