#pragma once

#include <ostream>

namespace nirenberg {

// Exit codes: 0 ok, 1 verification FAIL, 2 invalid input, 3 non-convergence.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

} // namespace nirenberg
