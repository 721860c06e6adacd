#pragma once

#include <iosfwd>

namespace beamroam::cli {

/// Exit codes: 0 ok, 1 usage or validation error, 2 runtime error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace beamroam::cli
