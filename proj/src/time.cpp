#include "quakedss/time.hpp"

#include <charconv>
#include <cstdio>

namespace quakedss {

namespace {

bool read_fixed(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{} && ptr == text.data() + pos + len;
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!read_fixed(text, 0, 4, y) || !read_fixed(text, 5, 2, m) || !read_fixed(text, 8, 2, d)) {
        return std::nullopt;
    }
    Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
              std::chrono::day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::optional<TimeOfDay> parse_time_of_day(std::string_view text) {
    int h = 0, m = 0, s = 0;
    if (text.size() != 5 && text.size() != 8) return std::nullopt;
    if (text[2] != ':' || !read_fixed(text, 0, 2, h) || !read_fixed(text, 3, 2, m)) return std::nullopt;
    if (text.size() == 8 && (text[5] != ':' || !read_fixed(text, 6, 2, s))) return std::nullopt;
    if (h > 23 || m > 59 || s > 59) return std::nullopt;
    return TimeOfDay{h * 3600 + m * 60 + s};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (text.size() < 19 || (text[10] != 'T' && text[10] != ' ')) return std::nullopt;
    auto rest = text.substr(19);
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return std::nullopt;
    auto date = parse_date(text.substr(0, 10));
    auto tod = parse_time_of_day(text.substr(11, 8));
    if (!date || !tod) return std::nullopt;
    return combine(*date, *tod);
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_time_of_day(TimeOfDay t) {
    auto s = t.count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", static_cast<long long>(s / 3600),
                  static_cast<long long>((s / 60) % 60), static_cast<long long>(s % 60));
    return buf;
}

std::string format_timestamp(Timestamp ts) {
    auto day = std::chrono::floor<std::chrono::days>(ts);
    return format_date(Date{day}) + "T" + format_time_of_day(ts - day) + "Z";
}

Timestamp combine(const Date& d, TimeOfDay t) {
    return std::chrono::sys_days{d} + t;
}

} // namespace quakedss
