#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace splatguard::cli {

enum ExitCode : int { kOk = 0, kPartial = 1, kInvalid = 2 };

/// Runs the command line; never throws. Diagnostics go to `err`, one-line
/// summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace splatguard::cli
