// cli.hpp — command-line front end (argument parsing and run dispatch)
#pragma once

namespace ptwalk {

// Parse argv and run the requested subcommand. Returns the process exit code:
// 0 on success, 2 for usage/validation problems, 3 when --strict was given and
// some result failed to converge, 1 for unexpected internal failures.
int run_cli(int argc, const char* const* argv);

}  // namespace ptwalk
