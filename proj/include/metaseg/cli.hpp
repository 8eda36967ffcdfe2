#pragma once

#include <iosfwd>

namespace metaseg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `metaseg` command-line tool. Subcommands: segment,
/// table, stats, metrics, gradcheck, gumbel, oracle-check, gen.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metaseg
