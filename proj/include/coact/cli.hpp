#pragma once

#include <string>
#include <vector>

namespace coact::cli {

inline constexpr const char* kToolVersion = "coact 0.1.0";

// Runs one subcommand. args excludes the program name.
// Exit codes: 0 success, 1 validation error, 2 usage error.
int dispatch(const std::vector<std::string>& args);

// temp-file + rename so readers never observe partial output
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v, int decimals = 6);

}  // namespace coact::cli
