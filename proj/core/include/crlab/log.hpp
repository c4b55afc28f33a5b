#pragma once

#include <functional>
#include <string_view>

namespace crlab {

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (default: one line to stderr). Pass an empty
/// function to silence warnings. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace crlab
