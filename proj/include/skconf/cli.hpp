#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace skconf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitInputError = 2;

// Schema version carried by every structured-json document.
inline constexpr int kSchemaVersion = 1;

// Runs one batch command. args excludes the program name. Results go to `out`
// only when the command succeeds; diagnostics go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace skconf::cli
