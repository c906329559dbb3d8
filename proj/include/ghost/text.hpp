// Copyright 2026 The Ghostline Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ghost::text {

// All character counting in the engine is in Unicode scalar values. Malformed
// UTF-8 sequences decode to U+FFFD, one replacement per offending byte.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view chars);
void AppendUtf8(std::string& out, char32_t c);
std::size_t Length(std::string_view utf8);

bool IsSpace(char32_t c);

// Offsets of the first character of every maximal non-whitespace run.
std::vector<std::size_t> WordStarts(std::u32string_view s);
std::size_t CountWords(std::u32string_view s);

std::string AsciiLower(std::string_view s);

// Code-point prefix of a UTF-8 string, at most `max_chars` characters.
std::string Truncate(std::string_view utf8, std::size_t max_chars);

// Longest common prefix, in characters.
std::size_t CommonPrefixLength(std::u32string_view a, std::u32string_view b);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace ghost::text
