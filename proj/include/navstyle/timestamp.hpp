#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace navstyle {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts ISO-8601 UTC: `YYYY-MM-DD[T| ]HH:MM:SS[.fff]` followed by `Z`,
// `+00:00`, ` UTC` or nothing. Throws ParseError.
Timestamp parse_timestamp(std::string_view text);

// `YYYY-MM-DDTHH:MM:SSZ`, with `.mmm` only when the milliseconds are nonzero.
std::string format_timestamp(Timestamp ts);

}  // namespace navstyle
