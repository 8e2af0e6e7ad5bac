#pragma once

#include <spdlog/spdlog.h>

namespace quadnls {

/// Applies QUADNLS_VERBOSITY (quiet | normal | debug) to the default logger.
/// Unset means normal; unrecognised values are reported and treated as normal.
void configure_logging();

}  // namespace quadnls
