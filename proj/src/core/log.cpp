#include "adaptcd/log.hpp"

#include <cstdlib>
#include <memory>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace adaptcd {

spdlog::logger& log() {
    static std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto logger = std::make_shared<spdlog::logger>("adaptcd", sink);
        logger->set_pattern("[%l] %v");
        auto level = spdlog::level::warn;
        if (const char* env = std::getenv("ADAPTCD_LOG")) {
            const std::string_view v(env);
            if (v == "error") level = spdlog::level::err;
            else if (v == "warn") level = spdlog::level::warn;
            else if (v == "info") level = spdlog::level::info;
            else if (v == "debug") level = spdlog::level::debug;
        }
        logger->set_level(level);
        return logger;
    }();
    return *instance;
}

}  // namespace adaptcd
