#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plab::cli {

// Exit codes: 0 success, 1 usage or malformed input, 2 precondition violation,
// 3 numerical-contract failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace plab::cli
