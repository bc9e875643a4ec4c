#pragma once

#include <functional>
#include <string>

namespace tunnel {

using WarningHandler = std::function<void(const std::string&)>;

/// Emits a non-fatal diagnostic. The default handler prints to stderr.
void warn(const std::string& message);

/// Replaces the process-wide warning handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

} // namespace tunnel
