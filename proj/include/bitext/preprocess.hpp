#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bitext/core.hpp"

namespace bitext::prep {

// Codepoint-sequence rewrite table plus a strip set. Loaded as data
// (TSV from<TAB>to, empty `to` = strip entry, '#' comments); the shipped
// default table carries quote/dash unification, zero-width strips and the
// Bengali nukta compositions. Load validates the idempotent closure: every
// mapping target must be stable under the table, and strip characters must
// not appear in targets.
struct NormalizationTable {
  std::map<std::u32string, std::u32string> char_map;
  std::set<char32_t> strip_set;

  static NormalizationTable load(const std::string& path);
};

// char_map longest-match-first, then strip-set removal. Zero-width joiners
// are kept directly after a virama (conjunct context). Idempotent.
std::string normalize_text(std::string_view text,
                           const NormalizationTable& table);

// Deletes every maximal run of script-foreign characters (neither Bengali
// nor basic Latin letters; whitespace/digits/punctuation are neutral and
// may ride along inside a run) of length >= min_len that occurs verbatim in
// both sides. Returns nullopt when a side is emptied; *diag then names the
// reason.
std::optional<SentencePair> remove_shared_foreign(const SentencePair& pair,
                                                  std::size_t min_len = 10,
                                                  std::string* diag = nullptr);

// Bengali-side transliteration of dangling ASCII: all-digit tokens map
// digit-wise to Bengali digits, bullet-decorated digits ("(1)", "1.") too,
// and bullet-decorated single Latin letters map via letter_map. Embedded
// alphanumerics ("COVID-19") are untouched. Token count is preserved.
std::string transliterate_dangling(std::string_view bn_text,
                                   const std::map<char32_t, char32_t>& letter_map = {});

enum class LeakMode { both_sides, either_side };

// Drops training pairs that collide with evaluation pairs: (src,tgt) match
// in both_sides mode, any-side text match in either_side mode.
std::vector<SentencePair> remove_leakage(
    const std::vector<SentencePair>& train,
    const std::vector<std::vector<SentencePair>>& eval_sets, LeakMode mode,
    std::size_t* dropped = nullptr);

// First occurrence wins, order preserved.
std::vector<SentencePair> dedup(const std::vector<SentencePair>& pairs);

struct EvalFilterRules {
  std::size_t min_chars = 50;
  std::size_t max_chars = 250;
  double max_translit_frac = 1.0 / 3.0;
  double max_oov_frac = 0.5;
  std::size_t max_oov_count = 5;
  std::unordered_set<std::string> vocab;             // training token set
  std::unordered_set<std::string> translit_lexicon;  // flagged tokens
};

struct Rejection {
  SentencePair pair;
  int rule;  // 1 = length, 2 = transliteration, 3 = OOV
};

// Keeps a pair iff all three rules pass on both sides; rejections carry the
// first failing rule. Throws ValidationError when vocab is empty.
std::pair<std::vector<SentencePair>, std::vector<Rejection>> quality_filter_eval(
    const std::vector<SentencePair>& pairs, const EvalFilterRules& rules);

}  // namespace bitext::prep
