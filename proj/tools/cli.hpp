#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csrecon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the csrecon tool. Data goes to `out` (or --out PATH),
/// diagnostics to `err`.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csrecon::cli
