#pragma once

#include <ostream>

namespace marginlab {

// Entry point of the marginlab tool. Results go to `out`, diagnostics and
// usage text to `err`. Returns 0 on success, 2 on a usage or configuration
// error, 1 when a run fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace marginlab
