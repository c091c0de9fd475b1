#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dac::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kIoError = 2;
inline constexpr int kScorerError = 3;

// Environment fallback for --endpoint.
inline constexpr const char* kEndpointEnv = "DAC_SCORER_ENDPOINT";

// Runs one command line (args excludes the program name). `out` receives
// results written to standard output, `err` diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dac::cli
