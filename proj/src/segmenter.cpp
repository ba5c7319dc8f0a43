#include "bitext/segmenter.hpp"

#include <algorithm>

#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/utf8.hpp"

namespace bitext::seg {

namespace u8 = bitext::utf8;

SegmenterRules default_rules() { return SegmenterRules{}; }

SegmenterRules load_rules(const std::string& abbrev_path,
                          const RuleOverrides* overrides) {
  SegmenterRules rules = default_rules();
  const std::vector<std::string> lines = io::read_lines(abbrev_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string entry = collapse_ws(lines[i]);
    if (entry.empty() || entry.front() == '#') continue;
    const auto dec = u8::decode(entry);
    for (char32_t cp : dec.cps)
      if (u8::is_space(cp))
        throw ValidationError(abbrev_path + ":" + std::to_string(i + 1) +
                              ": abbreviation entry contains whitespace");
    if (dec.cps.back() != U'.')
      throw ValidationError(abbrev_path + ":" + std::to_string(i + 1) +
                            ": abbreviation entry must end with '.'");
    rules.abbreviations.insert(std::move(entry));
  }
  if (overrides) {
    for (const std::string& a : overrides->abbreviations)
      rules.abbreviations.insert(a);
    for (char32_t cp : overrides->terminal_chars) rules.terminal_chars.insert(cp);
    for (const auto& [open, close] : overrides->quote_pairs)
      rules.quote_pairs.emplace(open, close);
    for (char32_t cp : overrides->bullet_chars) rules.bullet_chars.insert(cp);
  }
  return rules;
}

namespace {

bool is_dash(char32_t cp) {
  return cp == U'-' || cp == U'–' || cp == U'—';
}

// Length in codepoints of a list marker starting at pos, or 0. Recognizes
// bullet characters, "1." / "১।" / "3)" digit markers and parenthesized
// "(a)" / "(৩)" forms. Bare letter markers ("a.") are left to the initials
// rule so that wrapped lines starting with initials are not torn apart.
std::size_t match_bullet(const std::u32string& cps, std::size_t pos,
                         const SegmenterRules& rules) {
  const std::size_t n = cps.size();
  if (pos >= n) return 0;
  auto ok_after = [&](std::size_t end) {
    return end >= n || u8::is_space(cps[end]) || u8::is_letter(cps[end]);
  };
  const char32_t c = cps[pos];
  if (rules.bullet_chars.count(c)) return ok_after(pos + 1) ? 1 : 0;
  if (is_dash(c) && pos + 1 < n && (cps[pos + 1] == U' ' || cps[pos + 1] == U'\t'))
    return 1;
  if (!rules.numbered_bullets) return 0;

  std::size_t p = pos;
  bool paren = false;
  if (cps[p] == U'(') {
    paren = true;
    ++p;
  }
  std::size_t q = p;
  while (q < n && u8::is_digit(cps[q]) && q - p < 5) ++q;
  const std::size_t digits = q - p;
  if (digits >= 1 && digits <= 4) {
    if (paren)
      return (q < n && cps[q] == U')' && ok_after(q + 1)) ? q + 1 - pos : 0;
    if (q < n && (cps[q] == U'.' || cps[q] == U'।' || cps[q] == U')')) {
      if (cps[q] == U'.' && q + 1 < n && u8::is_digit(cps[q + 1])) return 0;
      return ok_after(q + 1) ? q + 1 - pos : 0;
    }
    return 0;
  }
  if (paren && q < n && u8::is_letter(cps[q]) && !u8::is_combining_mark(cps[q])) {
    ++q;
    while (q < n && u8::is_combining_mark(cps[q])) ++q;
    if (q < n && cps[q] == U')')
      return ok_after(q + 1) ? q + 1 - pos : 0;
  }
  return 0;
}

// "U.S.", "এ.", "কে." -- groups of one base letter (plus combining marks)
// each terminated by a period.
bool is_initialism(const std::u32string& token) {
  std::size_t i = 0;
  const std::size_t n = token.size();
  if (n == 0) return false;
  while (i < n) {
    if (!u8::is_letter(token[i]) || u8::is_combining_mark(token[i])) return false;
    ++i;
    while (i < n && u8::is_combining_mark(token[i])) ++i;
    if (i >= n || token[i] != U'.') return false;
    ++i;
  }
  return true;
}

struct Scanner {
  std::string_view text;
  const SegmenterRules& rules;
  const u8::Decoded dec;
  std::vector<Span> spans;
  std::vector<char32_t> stack;  // expected closers, innermost last
  std::ptrdiff_t span_start = -1;
  std::size_t last_ns = 0;  // last non-space codepoint index

  Scanner(std::string_view t, const SegmenterRules& r)
      : text(t), rules(r), dec(u8::decode(t)) {}

  void emit(std::size_t end_incl) {
    const std::size_t b = dec.offsets[static_cast<std::size_t>(span_start)];
    const std::size_t e = dec.offsets[end_incl + 1];
    spans.push_back(Span{b, e, std::string(text.substr(b, e - b))});
    span_start = -1;
  }

  bool opener_normal(char32_t cp) const {
    return u8::is_upper(cp) || u8::is_caseless_letter(cp) || u8::is_digit(cp) ||
           rules.quote_pairs.count(cp) > 0 || rules.bullet_chars.count(cp) > 0 ||
           is_dash(cp);
  }

  bool opener_ellipsis(char32_t cp) const {
    return u8::is_upper(cp) || u8::is_caseless_letter(cp) ||
           rules.quote_pairs.count(cp) > 0;
  }

  // True when the token containing position i is a list marker at the start
  // of its line whose terminal character should not split.
  bool in_line_start_marker(std::size_t i) const {
    std::size_t tok = i;
    while (tok > 0 && !u8::is_space(dec.cps[tok - 1])) --tok;
    std::size_t k = tok;
    while (k > 0 && (dec.cps[k - 1] == U' ' || dec.cps[k - 1] == U'\t')) --k;
    if (k != 0 && dec.cps[k - 1] != U'\n') return false;
    const std::size_t len = match_bullet(dec.cps, tok, rules);
    return len > 0 && tok + len > i;
  }

  bool token_blocks_split(std::size_t i) const {
    // Token ending at the period at index i, leading wrappers stripped.
    std::size_t tok = i;
    while (tok > 0 && !u8::is_space(dec.cps[tok - 1])) --tok;
    while (tok < i && (rules.quote_pairs.count(dec.cps[tok]) > 0))
      ++tok;
    if (tok > i) return false;
    const std::u32string token = dec.cps.substr(tok, i - tok + 1);
    if (token.size() <= 1) return false;  // bare "." never an abbreviation
    if (rules.abbreviations.count(u8::encode(token))) return true;
    if (is_initialism(token)) return true;
    return in_line_start_marker(i);
  }

  void run() {
    const std::u32string& cps = dec.cps;
    const std::size_t n = cps.size();
    for (std::size_t i = 0; i < n; ++i) {
      const char32_t cp = cps[i];
      if (u8::is_space(cp)) {
        if (cp == U'\n') handle_newline(i);
        continue;
      }
      if (span_start < 0) span_start = static_cast<std::ptrdiff_t>(i);
      last_ns = i;
      if (!stack.empty() && cp == stack.back()) {
        stack.pop_back();
        continue;
      }
      if (const auto it = rules.quote_pairs.find(cp); it != rules.quote_pairs.end()) {
        stack.push_back(it->second);
        continue;
      }
      if (rules.terminal_chars.count(cp)) i = handle_terminal(i);
    }
    if (span_start >= 0) emit(last_ns);
  }

  void handle_newline(std::size_t i) {
    const std::u32string& cps = dec.cps;
    const std::size_t n = cps.size();
    std::size_t j = i + 1;
    while (j < n && (cps[j] == U' ' || cps[j] == U'\t' || cps[j] == U'\r')) ++j;
    const bool paragraph = j < n && cps[j] == U'\n';
    const bool bullet = !paragraph && j < n && match_bullet(cps, j, rules) > 0;
    if (paragraph || bullet) {
      if (span_start >= 0) emit(last_ns);
      stack.clear();
    }
  }

  // Returns the index the main loop should continue from (inclusive).
  std::size_t handle_terminal(std::size_t i) {
    const std::u32string& cps = dec.cps;
    const std::size_t n = cps.size();
    std::vector<char32_t> sim = stack;
    std::size_t run_end = i;
    int terminal_count = 1;
    int dot_count = cps[i] == U'.' ? 1 : 0;
    bool saw_ellipsis = cps[i] == U'…';
    std::size_t j = i + 1;
    while (j < n) {
      if (rules.terminal_chars.count(cps[j])) {
        ++terminal_count;
        if (cps[j] == U'.') ++dot_count;
        if (cps[j] == U'…') saw_ellipsis = true;
      } else if (!sim.empty() && cps[j] == sim.back()) {
        sim.pop_back();
      } else {
        break;
      }
      run_end = j;
      ++j;
    }
    if (j < n && !u8::is_space(cps[j])) return i;  // mid-token: decimals, URLs

    const bool single_period = terminal_count == 1 && dot_count == 1;
    const bool single_danda = terminal_count == 1 && cps[i] == U'।';
    if (single_period && token_blocks_split(i)) return i;
    if (single_danda && in_line_start_marker(i)) return i;  // "১।" markers
    if (!sim.empty()) return i;  // inside an open quote/bracket: defer

    std::size_t k = j;
    while (k < n && u8::is_space(cps[k])) ++k;
    const bool ellipsis_run = saw_ellipsis || dot_count >= 2;
    bool boundary;
    if (k >= n)
      boundary = true;
    else if (ellipsis_run)
      boundary = opener_ellipsis(cps[k]);
    else
      boundary = opener_normal(cps[k]);
    if (!boundary) return i;

    emit(run_end);
    stack = std::move(sim);
    return run_end;
  }
};

}  // namespace

std::vector<Span> segment(std::string_view text, const SegmenterRules& rules) {
  if (text.empty()) return {};
  Scanner scanner(text, rules);
  scanner.run();
  return scanner.spans;
}

std::vector<std::string> segment_to_sentences(std::string_view text,
                                              const SegmenterRules& rules) {
  std::vector<std::string> out;
  // Spans keep raw bytes; the line-oriented form collapses any internal
  // newlines from wrapped input.
  for (const Span& span : segment(text, rules))
    out.push_back(collapse_ws(span.text));
  return out;
}

}  // namespace bitext::seg
