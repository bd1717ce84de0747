#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mgen::text {

/// Splits on '\n'. A trailing newline does not produce a trailing empty line.
std::vector<std::string> split_lines(std::string_view s);
std::string join_lines(const std::vector<std::string>& lines, std::size_t begin, std::size_t end);
std::string_view trim(std::string_view s) noexcept;
std::string collapse_whitespace(std::string_view s);
std::string to_lower(std::string_view s);
std::size_t count_lines(std::string_view s);

}  // namespace mgen::text
