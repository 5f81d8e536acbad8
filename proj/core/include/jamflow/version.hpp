#pragma once

namespace jamflow {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jamflow
