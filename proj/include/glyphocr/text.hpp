#pragma once

#include <string>
#include <string_view>

namespace glyphocr {

/// Decodes UTF-8 into code points. Invalid sequences decode to U+FFFD one
/// byte at a time so comparisons never throw on bad engine output.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

bool is_whitespace(char32_t c) noexcept;
std::u32string strip_whitespace(std::u32string_view text);

/// Trims leading and trailing whitespace (bytes), keeping interior text.
std::string trim(std::string_view text);

}  // namespace glyphocr
