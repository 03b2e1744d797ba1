#pragma once

namespace coreset {

// Bumped whenever a module's numerical output changes for the same inputs.
inline constexpr const char* kLossesVersion = "1.0.0";
inline constexpr const char* kSensitivityVersion = "1.0.0";
inline constexpr const char* kSamplingVersion = "1.0.0";
inline constexpr const char* kEvalVersion = "1.0.0";
inline constexpr const char* kCliVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

} // namespace coreset
