#pragma once

#include <iosfwd>

namespace hsto {

/// Entry point of the hsto tool. Returns 0 on success, 1 on invalid input, 2 on a
/// runtime failure; every failure writes one `error:` line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count from HSTO_THREADS (default: hardware concurrency). Throws invalid_value.
int thread_cap();

} // namespace hsto
