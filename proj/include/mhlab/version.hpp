#pragma once

namespace mhlab {

inline constexpr const char* kToolName = "mhlab";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "1.0";

}  // namespace mhlab
