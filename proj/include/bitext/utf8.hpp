#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bitext::utf8 {

// Decoded text: codepoints plus the byte offset of each one.
// offsets.size() == cps.size() + 1; offsets.back() == byte length.
struct Decoded {
  std::u32string cps;
  std::vector<std::size_t> offsets;
};

// Strict decode. Throws bitext::ParseError naming the first bad byte offset.
// Rejects overlong encodings and surrogates.
Decoded decode(std::string_view text);

// Byte offset of the first invalid sequence, or nullopt if valid.
std::optional<std::size_t> find_invalid(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

// Character classes. Range-based over the scripts this toolkit handles
// (Latin, Greek, Cyrillic, the Indic blocks, CJK); not a full Unicode
// property database.
bool is_space(char32_t cp);
bool is_ascii_digit(char32_t cp);
bool is_digit(char32_t cp);  // ASCII plus Bengali/Devanagari digits
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
bool is_caseless_letter(char32_t cp);  // scripts without case (Bengali, CJK, ...)
bool is_letter(char32_t cp);
bool is_combining_mark(char32_t cp);
bool is_bengali(char32_t cp);

// Simple one-to-one lowercase for the cased ranges above; identity elsewhere.
char32_t to_lower(char32_t cp);

}  // namespace bitext::utf8
