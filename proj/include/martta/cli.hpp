#pragma once

#include <ostream>

#include "martta/workbench.hpp"

namespace martta {

/// The martta command line. Returns the process exit code. `extend` adds
/// concepts to the language before it is sealed.
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const Workbench::Extension& extend = {});

}  // namespace martta
