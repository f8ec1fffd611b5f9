#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wsn::csv {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

double parse_double(std::string_view text);

}  // namespace wsn::csv
