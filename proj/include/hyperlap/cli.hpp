#pragma once

#include <ostream>

namespace hyperlap::cli {

// Exit codes: 0 success, 1 domain error (one "module/Code: message" line on
// err), 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hyperlap::cli
