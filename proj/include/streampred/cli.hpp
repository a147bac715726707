#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace streampred {

/// Entry point of the `streampred` tool. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on runtime failures; errors are
/// printed to `err` as a single `error: <message>` line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "LO..HI" (or a single number) into an inclusive range.
std::pair<std::size_t, std::size_t> parse_window_range(const std::string& text);

}  // namespace streampred
