#pragma once

#include <iosfwd>

namespace bolab {

/// Parses argv, builds and validates the config, runs it. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bolab
