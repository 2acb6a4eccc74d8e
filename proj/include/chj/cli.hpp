#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace chj::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;        // bad flags, config or missing files
inline constexpr int kExitCheckFailed = 2;  // a requested check did not pass

/// Runs one invocation. args excludes the program name. Outputs go to the
/// run's output directory together with manifest.yaml; out and err carry
/// the one-line summary and diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256 of data.
std::string sha256_hex(std::string_view data);

}  // namespace chj::cli
