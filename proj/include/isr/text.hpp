#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace isr {

/// Shortest decimal text that round-trips the double.
std::string format_double(double value);

/// Fixed-point text with `places` decimals.
std::string format_fixed(double value, int places);

/// Splits on commas; no quoting support (none of our files need it).
std::vector<std::string_view> split_csv(std::string_view line);

/// Strict full-string numeric parse; throws Error(Data) on failure.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace isr
