#ifndef EXPANAL_CLI_HPP
#define EXPANAL_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace expanal::cli
{

enum ExitCode : int
{
    exit_ok               = 0,
    exit_input_error      = 1,
    exit_degenerate       = 2,
    exit_recovery_failure = 3,
    exit_method_mismatch  = 4,
};

/// Runs the command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

} // namespace expanal::cli

#endif
