#pragma once

// Command-line entry point: run, render, corpus-stats and heatmap subcommands.

#include <iosfwd>
#include <string>
#include <vector>

namespace levelgen {

/// Exit status 0 on success, 2 on usage errors and missing files, 1 on other failures.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace levelgen
