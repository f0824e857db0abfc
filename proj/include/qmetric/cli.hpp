#pragma once

#include <iosfwd>

namespace qmetric::cli {

// Exit codes: 0 ok, 2 invalid input, 3 resource cap, 4 numerical failure.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qmetric::cli
