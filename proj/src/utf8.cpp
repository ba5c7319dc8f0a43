#include "bitext/utf8.hpp"

#include <string>

#include "bitext/errors.hpp"

namespace bitext::utf8 {

namespace {

// Returns sequence length, or 0 if b0 cannot start a sequence.
inline int seq_len(unsigned char b0) {
  if (b0 < 0x80) return 1;
  if (b0 >= 0xC2 && b0 <= 0xDF) return 2;
  if (b0 >= 0xE0 && b0 <= 0xEF) return 3;
  if (b0 >= 0xF0 && b0 <= 0xF4) return 4;
  return 0;
}

inline bool cont(unsigned char b) { return (b & 0xC0) == 0x80; }

// Decodes one codepoint at position i. Returns false on malformed input.
bool next_cp(std::string_view s, std::size_t i, char32_t& cp, int& len) {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data()) + i;
  const std::size_t left = s.size() - i;
  len = seq_len(p[0]);
  if (len == 0 || static_cast<std::size_t>(len) > left) return false;
  switch (len) {
    case 1:
      cp = p[0];
      return true;
    case 2:
      if (!cont(p[1])) return false;
      cp = ((p[0] & 0x1Fu) << 6) | (p[1] & 0x3Fu);
      return true;
    case 3: {
      // Exclude overlongs (E0 A0..) and surrogates (ED 80..9F only).
      unsigned char lo = 0x80, hi = 0xBF;
      if (p[0] == 0xE0) lo = 0xA0;
      if (p[0] == 0xED) hi = 0x9F;
      if (p[1] < lo || p[1] > hi || !cont(p[2])) return false;
      cp = ((p[0] & 0x0Fu) << 12) | ((p[1] & 0x3Fu) << 6) | (p[2] & 0x3Fu);
      return true;
    }
    default: {
      unsigned char lo = 0x80, hi = 0xBF;
      if (p[0] == 0xF0) lo = 0x90;
      if (p[0] == 0xF4) hi = 0x8F;
      if (p[1] < lo || p[1] > hi || !cont(p[2]) || !cont(p[3])) return false;
      cp = ((p[0] & 0x07u) << 18) | ((p[1] & 0x3Fu) << 12) |
           ((p[2] & 0x3Fu) << 6) | (p[3] & 0x3Fu);
      return true;
    }
  }
}

}  // namespace

Decoded decode(std::string_view text) {
  Decoded out;
  out.cps.reserve(text.size());
  out.offsets.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp;
    int len;
    if (!next_cp(text, i, cp, len))
      throw ParseError("invalid UTF-8 at byte offset " + std::to_string(i));
    out.offsets.push_back(i);
    out.cps.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  out.offsets.push_back(text.size());
  return out;
}

std::optional<std::size_t> find_invalid(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp;
    int len;
    if (!next_cp(text, i, cp, len)) return i;
    i += static_cast<std::size_t>(len);
  }
  return std::nullopt;
}

void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) append(out, cp);
  return out;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_digit(char32_t cp) {
  return is_ascii_digit(cp) || (cp >= 0x09E6 && cp <= 0x09EF) ||  // Bengali
         (cp >= 0x0966 && cp <= 0x096F);                          // Devanagari
}

bool is_upper(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return true;          // Latin-1
  if (cp >= 0x100 && cp <= 0x17F) return (cp & 1u) == 0;            // Latin Ext-A
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return true;       // Greek
  if (cp >= 0x400 && cp <= 0x42F) return true;                      // Cyrillic
  return false;
}

bool is_lower(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return true;
  if (cp >= 0xDF && cp <= 0xFF && cp != 0xF7) return true;
  if (cp >= 0x100 && cp <= 0x17F) return (cp & 1u) == 1;
  if (cp >= 0x3B1 && cp <= 0x3C9) return true;
  if (cp >= 0x430 && cp <= 0x45F) return true;
  return false;
}

bool is_combining_mark(char32_t cp) {
  if (cp >= 0x300 && cp <= 0x36F) return true;
  // Indic dependent signs (vowel signs, nukta, virama, candrabindu, ...).
  if (cp >= 0x900 && cp <= 0x903) return true;
  if (cp >= 0x93A && cp <= 0x94F) return true;
  if (cp >= 0x951 && cp <= 0x957) return true;
  if (cp >= 0x981 && cp <= 0x983) return true;
  if (cp == 0x9BC) return true;
  if (cp >= 0x9BE && cp <= 0x9CD) return true;
  if (cp == 0x9D7 || cp == 0x9E2 || cp == 0x9E3 || cp == 0x9FE) return true;
  return false;
}

bool is_bengali(char32_t cp) { return cp >= 0x980 && cp <= 0x9FF; }

bool is_caseless_letter(char32_t cp) {
  if (is_combining_mark(cp)) return false;
  if (cp >= 0x900 && cp <= 0x97F) return cp >= 0x904;        // Devanagari
  if (is_bengali(cp)) return !is_digit(cp) && cp != 0x9F2 && cp != 0x9F3;
  if (cp >= 0x0A00 && cp <= 0x0DFF) return true;             // other Indic
  if (cp >= 0x0E00 && cp <= 0x0E7F) return true;             // Thai
  if (cp >= 0x0600 && cp <= 0x06FF) return true;             // Arabic
  if (cp >= 0x0590 && cp <= 0x05FF) return true;             // Hebrew
  if (cp >= 0x3040 && cp <= 0x30FF) return true;             // Kana
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;             // CJK
  return false;
}

bool is_letter(char32_t cp) {
  return is_upper(cp) || is_lower(cp) || is_caseless_letter(cp);
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F && (cp & 1u) == 0) return cp + 1;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

}  // namespace bitext::utf8
