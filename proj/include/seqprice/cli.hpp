#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqprice {

// Entry point shared by the binary and the tests.  Returns the process exit
// code: 0 success / checks pass, 1 check failure, 2 usage error.
int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace seqprice
