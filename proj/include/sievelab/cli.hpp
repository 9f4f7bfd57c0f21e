#pragma once

#include <iosfwd>

// Command-line front end. Exit codes: 0 success, 1 validation/usage failure,
// 2 internal mathematical check failure.

namespace sievelab {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sievelab
