#pragma once

namespace busimorph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace busimorph
