#pragma once

#include <iosfwd>

namespace ldes {

// Exit codes: 0 success, 1 usage or validation error, 2 numerical failure.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldes
