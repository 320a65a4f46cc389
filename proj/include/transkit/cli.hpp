#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace transkit::cli {

enum ExitCode : int { kOk = 0, kUnequal = 2, kInputError = 3, kSkipped = 4 };

// Runs one command line (without the program name). Expressions given as "-"
// are read from `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace transkit::cli
