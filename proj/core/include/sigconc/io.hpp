#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sigconc::io {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Strict parse: the whole field must be consumed and the result finite.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

std::vector<std::string_view> split_csv_line(std::string_view line);

std::string_view trim(std::string_view s);

}  // namespace sigconc::io
