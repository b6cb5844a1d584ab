#pragma once

namespace hfm {

inline constexpr const char* kToolVersion = "0.1.0";

// Version of the JSON report schema emitted by the CLI. Fields are
// additive-only within a major version.
inline constexpr const char* kReportVersion = "1.0.0";

}  // namespace hfm
