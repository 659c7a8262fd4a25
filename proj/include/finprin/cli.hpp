#pragma once

// Command-line front end. Exit codes: 0 success, 1 other failure, 2 usage or
// input error, 3 violated hypothesis, 4 search cap exceeded.

#include <iosfwd>

namespace finprin {

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace finprin
