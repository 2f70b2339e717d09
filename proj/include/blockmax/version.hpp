#pragma once

namespace blockmax {

inline constexpr const char* version = "0.1.0";

}  // namespace blockmax
