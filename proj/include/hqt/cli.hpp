#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hqt::cli {

// Exit codes: 0 success, 1 usage or I/O error, 2 verify found engine
// disagreement beyond tolerance.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hqt::cli
