#pragma once

#include <ostream>

namespace manev::cli {

/// Runs the command line. Returns 0 on success, 1 on domain errors and 2 on
/// usage errors; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace manev::cli
