#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace infosal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

// `args` excludes the program name. Reports go to `out`, diagnostics and
// usage text to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace infosal::cli
