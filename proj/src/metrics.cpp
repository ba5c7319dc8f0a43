#include "bitext/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "bitext/errors.hpp"
#include "bitext/utf8.hpp"

namespace bitext::metrics {

namespace {

// ASCII punctuation always split off by 13a. Everything printable except
// letters, digits, apostrophe, comma, period and hyphen.
bool split_always(char32_t cp) {
  if (cp > 0x7E) return false;
  if ((cp >= U'{' && cp <= U'~') || (cp >= U'[' && cp <= U'`')) return true;
  if (cp >= U'!' && cp <= U'&') return true;
  if (cp >= U'(' && cp <= U'+') return true;
  if (cp == U'/') return true;
  if (cp >= U':' && cp <= U'@') return true;
  return false;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

std::vector<std::string> tokenize_13a(std::string_view text, bool case_fold) {
  std::string pre(text);
  replace_all(pre, "<skipped>", "");
  replace_all(pre, "-\n", "");
  replace_all(pre, "\n", " ");
  replace_all(pre, "&quot;", "\"");
  replace_all(pre, "&amp;", "&");
  replace_all(pre, "&lt;", "<");
  replace_all(pre, "&gt;", ">");

  const auto dec = utf8::decode(pre);
  const std::u32string& cps = dec.cps;
  std::string spaced;
  spaced.reserve(pre.size() + 16);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    const bool has_prev = i > 0;
    const bool has_next = i + 1 < cps.size();
    if (split_always(cp)) {
      spaced.push_back(' ');
      utf8::append(spaced, cp);
      spaced.push_back(' ');
    } else if (cp == U'.' || cp == U',') {
      const bool prev_nondigit = has_prev && !utf8::is_ascii_digit(cps[i - 1]);
      const bool next_nondigit = has_next && !utf8::is_ascii_digit(cps[i + 1]);
      if (prev_nondigit || next_nondigit) {
        spaced.push_back(' ');
        utf8::append(spaced, cp);
        spaced.push_back(' ');
      } else {
        utf8::append(spaced, cp);
      }
    } else if (cp == U'-' && has_prev && utf8::is_ascii_digit(cps[i - 1])) {
      spaced.push_back(' ');
      spaced.push_back('-');
      spaced.push_back(' ');
    } else {
      utf8::append(spaced, case_fold ? utf8::to_lower(cp) : cp);
    }
  }

  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < spaced.size()) {
    while (pos < spaced.size() && std::isspace(static_cast<unsigned char>(spaced[pos])))
      ++pos;
    std::size_t end = pos;
    while (end < spaced.size() && !std::isspace(static_cast<unsigned char>(spaced[end])))
      ++end;
    if (end > pos) tokens.emplace_back(spaced.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

namespace {

using Counts = std::unordered_map<std::string, int>;

// n-grams keyed by joining tokens with an unlikely separator.
Counts ngram_counts(const std::vector<std::string>& tokens, int n) {
  Counts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) {
      if (j) key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

struct LevelCounts {
  long long matches = 0;
  long long total = 0;
};

LevelCounts clipped_matches(const std::vector<std::string>& hyp,
                            const std::vector<std::vector<std::string>>& refs,
                            int n) {
  LevelCounts lc;
  const Counts hyp_counts = ngram_counts(hyp, n);
  Counts ref_max;
  for (const auto& ref : refs)
    for (const auto& [key, count] : ngram_counts(ref, n)) {
      int& slot = ref_max[key];
      slot = std::max(slot, count);
    }
  for (const auto& [key, count] : hyp_counts) {
    lc.total += count;
    const auto it = ref_max.find(key);
    if (it != ref_max.end()) lc.matches += std::min(count, it->second);
  }
  return lc;
}

std::size_t closest_ref_len(std::size_t hyp_len,
                            const std::vector<std::vector<std::string>>& refs) {
  std::size_t best = refs.front().size();
  for (const auto& ref : refs) {
    const auto diff = [&](std::size_t len) {
      return len > hyp_len ? len - hyp_len : hyp_len - len;
    };
    if (diff(ref.size()) < diff(best) ||
        (diff(ref.size()) == diff(best) && ref.size() < best))
      best = ref.size();
  }
  return best;
}

void check_bleu_params(const BleuParams& params) {
  if (params.max_ngram < 1 || params.max_ngram > 4)
    throw std::invalid_argument("max_ngram must be in 1..4");
}

}  // namespace

double sentence_bleu(const std::vector<std::string>& hyp,
                     const std::vector<std::vector<std::string>>& refs,
                     const BleuParams& params) {
  check_bleu_params(params);
  if (refs.empty()) throw std::invalid_argument("sentence_bleu: no references");
  const std::size_t c = hyp.size();
  if (c == 0) return 0.0;

  const int n_levels = params.max_ngram;
  double log_sum = 0.0;
  for (int n = 1; n <= n_levels; ++n) {
    const LevelCounts lc = clipped_matches(hyp, refs, n);
    double p;
    if (lc.matches > 0) {
      p = static_cast<double>(lc.matches) / static_cast<double>(lc.total);
    } else if (n >= 2 && params.smooth) {
      p = 1.0 / static_cast<double>(lc.total + 1);
    } else {
      return 0.0;
    }
    log_sum += std::log(p);
  }
  const std::size_t r = closest_ref_len(c, refs);
  const double bp =
      c >= r ? 1.0
             : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / n_levels);
}

double corpus_bleu(
    const std::vector<std::vector<std::string>>& hyps,
    const std::vector<std::vector<std::vector<std::string>>>& refs_list,
    const BleuParams& params) {
  check_bleu_params(params);
  if (hyps.size() != refs_list.size())
    throw std::invalid_argument("corpus_bleu: hyps/refs length mismatch");
  if (hyps.empty()) throw std::invalid_argument("corpus_bleu: empty corpus");

  const int n_levels = params.max_ngram;
  std::vector<LevelCounts> levels(static_cast<std::size_t>(n_levels));
  long long c = 0, r = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (refs_list[i].empty())
      throw std::invalid_argument("corpus_bleu: segment " + std::to_string(i) +
                                  " has no references");
    for (int n = 1; n <= n_levels; ++n) {
      const LevelCounts lc = clipped_matches(hyps[i], refs_list[i], n);
      levels[static_cast<std::size_t>(n - 1)].matches += lc.matches;
      levels[static_cast<std::size_t>(n - 1)].total += lc.total;
    }
    c += static_cast<long long>(hyps[i].size());
    r += static_cast<long long>(closest_ref_len(hyps[i].size(), refs_list[i]));
  }
  if (c == 0) return 0.0;

  double log_sum = 0.0;
  int used_levels = 0;
  for (const LevelCounts& lc : levels) {
    if (lc.total == 0) continue;  // corpus shorter than n everywhere
    if (lc.matches == 0) return 0.0;
    log_sum += std::log(static_cast<double>(lc.matches) /
                        static_cast<double>(lc.total));
    ++used_levels;
  }
  if (used_levels == 0) return 0.0;
  const double bp =
      c >= r ? 1.0
             : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return 100.0 * bp * std::exp(log_sum / used_levels);
}

std::string normalize_eval_text(std::string_view text, bool case_fold) {
  std::string collapsed = collapse_ws(text);
  if (!case_fold) return collapsed;
  const auto dec = utf8::decode(collapsed);
  std::string out;
  out.reserve(collapsed.size());
  for (char32_t cp : dec.cps) utf8::append(out, utf8::to_lower(cp));
  return out;
}

GoldSet GoldSet::from_pairs(const std::vector<SentencePair>& pairs,
                            bool case_fold) {
  GoldSet gold;
  gold.case_fold = case_fold;
  for (const SentencePair& p : pairs)
    gold.pairs.emplace(normalize_eval_text(p.src_text, case_fold),
                       normalize_eval_text(p.tgt_text, case_fold));
  return gold;
}

AlignReport precision_recall_f1(const std::vector<SentencePair>& pred,
                                const GoldSet& gold) {
  if (gold.pairs.empty())
    throw ValidationError("precision_recall_f1: empty gold set");
  std::set<std::pair<std::string, std::string>> pred_set;
  for (const SentencePair& p : pred)
    pred_set.emplace(normalize_eval_text(p.src_text, gold.case_fold),
                     normalize_eval_text(p.tgt_text, gold.case_fold));
  std::size_t correct = 0;
  for (const auto& p : pred_set)
    if (gold.pairs.count(p)) ++correct;
  return make_align_report(pred_set.size(), gold.pairs.size(), correct);
}

}  // namespace bitext::metrics
