#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace quakedss {

// All times are UTC.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;
using TimeOfDay = std::chrono::seconds; // seconds since midnight, [0, 86400)

// "YYYY-MM-DD"
std::optional<Date> parse_date(std::string_view text);
// "HH:MM" or "HH:MM:SS"
std::optional<TimeOfDay> parse_time_of_day(std::string_view text);
// "YYYY-MM-DDTHH:MM:SSZ" (a trailing 'Z' or "+00:00" is accepted, or none)
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_date(const Date& d);
std::string format_time_of_day(TimeOfDay t);
std::string format_timestamp(Timestamp ts);

Timestamp combine(const Date& d, TimeOfDay t);

} // namespace quakedss
