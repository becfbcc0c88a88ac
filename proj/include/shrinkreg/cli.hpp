#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shrinkreg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitUsage = 64;

/// args[0] is the program name. Progress and summaries go to `out`, errors
/// and usage to `err`.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, char** argv);

std::string usage_text();

}  // namespace shrinkreg
