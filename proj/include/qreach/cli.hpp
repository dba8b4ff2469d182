#pragma once

#include <iosfwd>

namespace qreach::cli {

/// Runs one subcommand. Returns 0 on success, 1 on a domain or runtime
/// error, 2 on a usage error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace qreach::cli
