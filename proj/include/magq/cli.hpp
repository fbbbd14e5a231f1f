#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace magq::cli {

// Entry point behind the `magq` binary. Args exclude argv[0].
// Exit codes: 0 ok, 2 config/usage error, 3 stability/convergence error,
// 4 not-found / ambiguity / singularity / insufficient-span.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal formatting, locale-independent; shared by the
// CSV writers so identical configs produce byte-identical files.
std::string format_double(double v);

} // namespace magq::cli
