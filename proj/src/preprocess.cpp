#include "bitext/preprocess.hpp"

#include <algorithm>

#include "bitext/errors.hpp"
#include "bitext/io.hpp"
#include "bitext/utf8.hpp"

namespace bitext::prep {

namespace u8 = bitext::utf8;

namespace {

constexpr char32_t kVirama = 0x09CD;

bool is_zero_width_joiner(char32_t cp) { return cp == 0x200C || cp == 0x200D; }

std::u32string apply_table(std::u32string_view cps,
                           const NormalizationTable& table) {
  // Strip pass first: removing zero-width characters later would create
  // fresh key adjacencies and break idempotence. Zero-width joiners survive
  // in conjunct position (directly after a virama).
  std::u32string stripped;
  stripped.reserve(cps.size());
  for (std::size_t j = 0; j < cps.size(); ++j) {
    const char32_t cp = cps[j];
    if (table.strip_set.count(cp)) {
      const bool conjunct =
          is_zero_width_joiner(cp) && j > 0 && cps[j - 1] == kVirama;
      if (!conjunct) continue;
    }
    stripped += cp;
  }
  // Longest-match-first over map keys, single pass; replacements are not
  // rescanned. Load-time validation keeps targets fixed points.
  std::size_t max_key = 0;
  for (const auto& [from, to] : table.char_map)
    max_key = std::max(max_key, from.size());
  std::u32string out;
  out.reserve(stripped.size());
  std::size_t i = 0;
  while (i < stripped.size()) {
    bool replaced = false;
    const std::size_t limit = std::min(max_key, stripped.size() - i);
    for (std::size_t len = limit; len >= 1; --len) {
      const auto it =
          table.char_map.find(std::u32string(stripped.substr(i, len)));
      if (it != table.char_map.end()) {
        out += it->second;
        i += len;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += stripped[i++];
  }
  return out;
}

}  // namespace

NormalizationTable NormalizationTable::load(const std::string& path) {
  NormalizationTable table;
  const std::vector<std::string> lines = io::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(i + 1) +
                       ": expected from<TAB>to");
    const std::u32string from = u8::decode(line.substr(0, tab)).cps;
    const std::u32string to = u8::decode(line.substr(tab + 1)).cps;
    if (from.empty())
      throw ParseError(path + ":" + std::to_string(i + 1) + ": empty source");
    if (to.empty()) {
      if (from.size() != 1)
        throw ParseError(path + ":" + std::to_string(i + 1) +
                         ": strip entries must be single codepoints");
      table.strip_set.insert(from[0]);
    } else {
      table.char_map[from] = to;
    }
  }
  // Idempotent closure: targets must be fixed points of the table.
  for (const auto& [from, to] : table.char_map) {
    if (apply_table(to, table) != to)
      throw ValidationError(path + ": mapping target '" + u8::encode(to) +
                            "' is not stable under the table (cycle or chain)");
  }
  return table;
}

std::string normalize_text(std::string_view text,
                           const NormalizationTable& table) {
  return u8::encode(apply_table(u8::decode(text).cps, table));
}

namespace {

bool expected_script(char32_t cp) {
  return u8::is_bengali(cp) || (cp >= U'A' && cp <= U'Z') ||
         (cp >= U'a' && cp <= U'z');
}

bool neutral_char(char32_t cp) {
  if (u8::is_space(cp) || u8::is_digit(cp)) return true;
  if (cp < 0x80) return !expected_script(cp);  // ASCII punctuation
  // General punctuation, quotes, dashes.
  if (cp >= 0x2000 && cp <= 0x206F) return true;
  return cp == 0xA0 || cp == 0xAB || cp == 0xBB;
}

bool foreign_char(char32_t cp) {
  return !expected_script(cp) && !neutral_char(cp);
}

// Maximal runs of foreign-or-neutral codepoints containing at least one
// foreign codepoint, trimmed of surrounding whitespace.
std::vector<std::u32string> foreign_runs(const std::u32string& cps,
                                         std::size_t min_len) {
  std::vector<std::u32string> runs;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!foreign_char(cps[i]) && !neutral_char(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    bool any_foreign = false;
    while (j < cps.size() && (foreign_char(cps[j]) || neutral_char(cps[j]))) {
      any_foreign = any_foreign || foreign_char(cps[j]);
      ++j;
    }
    if (any_foreign) {
      std::size_t a = i, b = j;
      while (a < b && u8::is_space(cps[a])) ++a;
      while (b > a && u8::is_space(cps[b - 1])) --b;
      if (b - a >= min_len) runs.push_back(cps.substr(a, b - a));
    }
    i = j;
  }
  return runs;
}

void erase_all(std::u32string& hay, const std::u32string& needle) {
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::u32string::npos)
    hay.erase(pos, needle.size());
}

}  // namespace

std::optional<SentencePair> remove_shared_foreign(const SentencePair& pair,
                                                  std::size_t min_len,
                                                  std::string* diag) {
  std::u32string src = u8::decode(pair.src_text).cps;
  std::u32string tgt = u8::decode(pair.tgt_text).cps;
  bool changed = false;
  for (const std::u32string& run : foreign_runs(src, min_len)) {
    if (tgt.find(run) == std::u32string::npos) continue;
    erase_all(src, run);
    erase_all(tgt, run);
    changed = true;
  }
  if (!changed) return pair;
  std::string new_src = collapse_ws(u8::encode(src));
  std::string new_tgt = collapse_ws(u8::encode(tgt));
  if (new_src.empty() || new_tgt.empty()) {
    if (diag)
      *diag = "pair emptied by shared foreign-string removal: '" +
              pair.src_text + "' / '" + pair.tgt_text + "'";
    return std::nullopt;
  }
  SentencePair out = pair;
  out.src_text = std::move(new_src);
  out.tgt_text = std::move(new_tgt);
  return out;
}

namespace {

constexpr char32_t kBengaliZero = 0x09E6;

bool all_ascii_digits(const std::u32string& s) {
  if (s.empty()) return false;
  for (char32_t cp : s)
    if (!u8::is_ascii_digit(cp)) return false;
  return true;
}

// "(x)", "x)", "x." with x a digit run or single ASCII letter.
struct BulletToken {
  std::u32string prefix, core, suffix;
  bool ok = false;
};

BulletToken split_bullet(const std::u32string& tok) {
  BulletToken r;
  std::size_t a = 0, b = tok.size();
  if (a < b && tok[a] == U'(') {
    r.prefix = U"(";
    ++a;
  }
  if (b > a && (tok[b - 1] == U')' || tok[b - 1] == U'.')) {
    r.suffix = tok.substr(b - 1);
    --b;
  }
  if (r.prefix.empty() && r.suffix.empty()) return r;
  if (b <= a) return r;
  r.core = tok.substr(a, b - a);
  const bool digits = all_ascii_digits(r.core);
  const bool letter = r.core.size() == 1 &&
                      ((r.core[0] >= U'a' && r.core[0] <= U'z') ||
                       (r.core[0] >= U'A' && r.core[0] <= U'Z'));
  r.ok = digits || letter;
  return r;
}

std::u32string map_digits(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t cp : s) out += kBengaliZero + (cp - U'0');
  return out;
}

}  // namespace

std::string transliterate_dangling(std::string_view bn_text,
                                   const std::map<char32_t, char32_t>& letter_map) {
  const std::u32string cps = u8::decode(bn_text).cps;
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    if (u8::is_space(cps[i])) {
      out += cps[i++];
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !u8::is_space(cps[j])) ++j;
    const std::u32string tok = cps.substr(i, j - i);
    if (all_ascii_digits(tok)) {
      out += map_digits(tok);
    } else if (const BulletToken b = split_bullet(tok); b.ok) {
      out += b.prefix;
      if (all_ascii_digits(b.core)) {
        out += map_digits(b.core);
      } else {
        const auto it = letter_map.find(u8::to_lower(b.core[0]));
        out += it != letter_map.end() ? std::u32string(1, it->second) : b.core;
      }
      out += b.suffix;
    } else {
      out += tok;
    }
    i = j;
  }
  return u8::encode(out);
}

std::vector<SentencePair> remove_leakage(
    const std::vector<SentencePair>& train,
    const std::vector<std::vector<SentencePair>>& eval_sets, LeakMode mode,
    std::size_t* dropped) {
  std::set<std::pair<std::string, std::string>> eval_pairs;
  std::set<std::string> eval_sides;
  for (const auto& eval_set : eval_sets)
    for (const SentencePair& p : eval_set) {
      const std::string s = collapse_ws(p.src_text);
      const std::string t = collapse_ws(p.tgt_text);
      eval_pairs.emplace(s, t);
      eval_sides.insert(s);
      eval_sides.insert(t);
    }
  std::vector<SentencePair> kept;
  kept.reserve(train.size());
  std::size_t n_dropped = 0;
  for (const SentencePair& p : train) {
    const std::string s = collapse_ws(p.src_text);
    const std::string t = collapse_ws(p.tgt_text);
    const bool leak = mode == LeakMode::both_sides
                          ? eval_pairs.count({s, t}) > 0
                          : eval_sides.count(s) > 0 || eval_sides.count(t) > 0;
    if (leak)
      ++n_dropped;
    else
      kept.push_back(p);
  }
  if (dropped) *dropped = n_dropped;
  return kept;
}

std::vector<SentencePair> dedup(const std::vector<SentencePair>& pairs) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<SentencePair> out;
  out.reserve(pairs.size());
  for (const SentencePair& p : pairs)
    if (seen.emplace(p.src_text, p.tgt_text).second) out.push_back(p);
  return out;
}

namespace {

std::vector<std::string> ws_tokens(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  for (char32_t cp : u8::decode(text).cps) {
    if (u8::is_space(cp)) {
      if (!cur.empty()) toks.push_back(std::move(cur));
      cur.clear();
    } else {
      u8::append(cur, u8::to_lower(cp));
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

}  // namespace

std::pair<std::vector<SentencePair>, std::vector<Rejection>> quality_filter_eval(
    const std::vector<SentencePair>& pairs, const EvalFilterRules& rules) {
  if (rules.vocab.empty())
    throw ValidationError("quality_filter_eval: empty vocabulary with the OOV rule active");
  if (rules.min_chars == 0 || rules.min_chars >= rules.max_chars)
    throw ValidationError("quality_filter_eval: need 0 < min_chars < max_chars");

  std::vector<SentencePair> kept;
  std::vector<Rejection> rejected;
  for (const SentencePair& p : pairs) {
    int rule = 0;
    for (const std::string* side : {&p.src_text, &p.tgt_text}) {
      const std::size_t chars = u8::decode(*side).cps.size();
      if (chars < rules.min_chars || chars > rules.max_chars) {
        rule = 1;
        break;
      }
    }
    if (rule == 0 && !rules.translit_lexicon.empty()) {
      for (const std::string* side : {&p.src_text, &p.tgt_text}) {
        const auto toks = ws_tokens(*side);
        if (toks.empty()) continue;
        std::size_t flagged = 0;
        for (const auto& tok : toks) flagged += rules.translit_lexicon.count(tok);
        if (static_cast<double>(flagged) >
            rules.max_translit_frac * static_cast<double>(toks.size())) {
          rule = 2;
          break;
        }
      }
    }
    if (rule == 0) {
      for (const std::string* side : {&p.src_text, &p.tgt_text}) {
        const auto toks = ws_tokens(*side);
        if (toks.empty()) continue;
        std::size_t oov = 0;
        for (const auto& tok : toks) oov += rules.vocab.count(tok) == 0;
        if (static_cast<double>(oov) >
                rules.max_oov_frac * static_cast<double>(toks.size()) ||
            oov > rules.max_oov_count) {
          rule = 3;
          break;
        }
      }
    }
    if (rule == 0)
      kept.push_back(p);
    else
      rejected.push_back(Rejection{p, rule});
  }
  return {std::move(kept), std::move(rejected)};
}

}  // namespace bitext::prep
