#ifndef WFARED_TOOLS_CLI_HPP
#define WFARED_TOOLS_CLI_HPP

namespace wfared::cli {

/// Entry point of the command-line tool.  Exit codes: 0 success, 1 input
/// error, 2 numerical failure, 3 verification failure.
int run(int argc, char** argv);

}  // namespace wfared::cli

#endif
