#pragma once

#include <functional>
#include <string>

namespace skt {

// Process-wide warning sink. Defaults to stderr; tests and the CLI may
// replace it. Safe to call from worker threads.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace skt
