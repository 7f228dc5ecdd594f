#pragma once

namespace gmwb {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace gmwb
