#pragma once

namespace bandit {

inline constexpr const char* kToolName = "bandit-minimax";
inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace bandit
