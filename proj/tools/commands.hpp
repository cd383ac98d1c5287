#pragma once

namespace dfpred::cli {

/// Parses argv and dispatches to a subcommand. Exit codes: 0 success,
/// 2 usage error, 3 data error, 4 numerical failure.
int run(int argc, char** argv);

}  // namespace dfpred::cli
