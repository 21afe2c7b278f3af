#pragma once

namespace bets {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bets
