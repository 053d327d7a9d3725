#pragma once

namespace ioncavity {

inline constexpr const char* kVersion = "1.0.0";

} // namespace ioncavity
