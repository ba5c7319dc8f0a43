#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace bitext::seg {

// Rule table for the boundary scanner. Abbreviation entries are exact
// period-terminated tokens; single-letter initials (any script, combining
// marks allowed) are recognized without listing.
struct SegmenterRules {
  std::unordered_set<std::string> abbreviations;
  std::set<char32_t> terminal_chars{U'.', U'!', U'?', U'।', U'…'};
  std::map<char32_t, char32_t> quote_pairs{
      {U'"', U'"'},      {U'“', U'”'}, {U'‘', U'’'},
      {U'«', U'»'}, {U'‹', U'›'}, {U'(', U')'},
      {U'[', U']'},      {U'{', U'}'}};
  std::set<char32_t> bullet_chars{U'•', U'▪', U'‣', U'◦'};
  // "1." / "১।" / "(a)" / "(৩)" style markers at line start.
  bool numbered_bullets = true;
};

SegmenterRules default_rules();

// Additive extensions merged on top of the defaults + lexicon file.
struct RuleOverrides {
  std::vector<std::string> abbreviations;
  std::u32string terminal_chars;
  std::map<char32_t, char32_t> quote_pairs;
  std::u32string bullet_chars;
};

// Loads the abbreviation lexicon (one token per line, '#' comments) and
// merges defaults, file entries and overrides. Entries must end with '.'
// and contain no whitespace; violations raise ValidationError with the
// line number.
SegmenterRules load_rules(const std::string& abbrev_path,
                          const RuleOverrides* overrides = nullptr);

// A sentence span: byte offsets into the original text plus the substring.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string text;
};

// Splits text into sentence spans. Spans are ordered, non-overlapping and
// cover every non-whitespace character, so joining them with single spaces
// reproduces the whitespace-normalized input.
std::vector<Span> segment(std::string_view text, const SegmenterRules& rules);

std::vector<std::string> segment_to_sentences(std::string_view text,
                                              const SegmenterRules& rules);

}  // namespace bitext::seg
