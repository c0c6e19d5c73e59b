#pragma once

namespace qgeo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qgeo
