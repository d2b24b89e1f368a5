// SPDX-License-Identifier: Apache-2.0
//
// Text helpers shared by the TSV/JSON readers and writers. Doubles are
// rendered with std::to_chars shortest form, so write -> read round-trips
// reproduce the exact bit pattern.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nmf {

std::string format_double(double value);
bool try_parse_double(std::string_view token, double& out);

std::vector<std::string_view> split_tabs(std::string_view line);

// Splits on '\n'; a trailing '\r' on any line is dropped. The final line
// needs no terminator.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace nmf
