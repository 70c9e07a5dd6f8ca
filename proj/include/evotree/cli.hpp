#pragma once

namespace evotree {

/// Entry point behind the `evotree` binary. Returns the process exit code:
/// 0 on success, 2 on usage errors (bad flags, missing arguments, invalid
/// parameter values), 1 when a pipeline stage fails.
int run_cli(int argc, const char* const* argv);

}  // namespace evotree
