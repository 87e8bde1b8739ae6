#pragma once

namespace polefinder {

inline constexpr const char* kVersion = "0.1.0";

//! Version of the JSON output schemas (estimates, reports, manifests).
inline constexpr int kSchemaVersion = 1;

}  // namespace polefinder
