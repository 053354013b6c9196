#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catastrophe::cli {

enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kTruncation = 3,
    kIo = 4,
};

/// Runs one command line (without the program name). Results go to `out`
/// unless an output path is configured; failures produce one line on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catastrophe::cli
