#pragma once

#include <iosfwd>

namespace icl_lab {

/// Exit codes: 0 success, 1 parameter or usage error, 2 experiment did not
/// pass, 3 I/O error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace icl_lab
