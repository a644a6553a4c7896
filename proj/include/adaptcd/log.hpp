#pragma once

#include <spdlog/spdlog.h>

namespace adaptcd {

// stderr logger; level taken from ADAPTCD_LOG (error|warn|info|debug), default warn.
spdlog::logger& log();

}  // namespace adaptcd
