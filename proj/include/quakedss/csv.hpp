#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace quakedss::csv {

// One CSV line, RFC 4180 quoting ("a,b" and "" escapes); no embedded newlines.
// Returns false on an unterminated quote.
bool parse_line(std::string_view line, std::vector<std::string>& fields);

std::string quote(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace quakedss::csv
