#pragma once

#include <iosfwd>

namespace matchdist::cli {

// Dispatches the command line and writes results to the given streams.
// Returns 0 on success, 1 on domain errors, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace matchdist::cli
