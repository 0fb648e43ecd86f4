#pragma once

#include <iosfwd>

namespace vprisk::cli {

/// Full command line entry point; returns the process exit code.
int run_app(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace vprisk::cli
