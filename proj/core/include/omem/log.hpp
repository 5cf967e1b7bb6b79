#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace omem {

using WarningHandler = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink (default: stderr). Returns the old one.
WarningHandler set_warning_handler(WarningHandler handler);

/// Thread-safe; forwards to the installed handler.
void warn(std::string_view message);

}  // namespace omem
