#pragma once

#include <iosfwd>

namespace sumdca::cli {

/// Entry point of the `sumdca` tool. Returns the process exit status:
/// 0 on success, 1 for runtime failures (bad data, invalid config, missing
/// files), CLI11's code for command-line parse errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sumdca::cli
