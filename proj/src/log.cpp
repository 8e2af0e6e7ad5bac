#include "quadnls/log.hpp"

#include <cstdlib>
#include <string_view>

namespace quadnls {

void configure_logging() {
  const char* raw = std::getenv("QUADNLS_VERBOSITY");
  const std::string_view level = raw ? raw : "normal";
  if (level == "quiet") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "normal") spdlog::warn("unknown QUADNLS_VERBOSITY '{}', using normal", level);
  }
}

}  // namespace quadnls
