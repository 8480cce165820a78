#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xmppsteg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSuspicious = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

/// Runs one CLI invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xmppsteg::cli
