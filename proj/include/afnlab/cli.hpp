#pragma once

#include <string>
#include <vector>

namespace afn {

// Batch front-end.  Subcommands: induce | tails | ulam | tower | verify |
// correlate | report.  Exit codes: 0 pass, 1 usage, 2 coverage/truncation,
// 3 mode mismatch, 4 tolerance failure.
int cli_run(const std::vector<std::string>& args);

} // namespace afn
