#pragma once

namespace msreg::cli {

/// Parses arguments, runs the chosen subcommand, returns the process exit code.
int run(int argc, char** argv);

}  // namespace msreg::cli
