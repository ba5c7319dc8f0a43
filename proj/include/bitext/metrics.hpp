#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bitext/core.hpp"

namespace bitext::metrics {

struct BleuParams {
  int max_ngram = 4;
  // Add-one smoothing of zero n-gram precisions for n >= 2. Applies at
  // sentence level only; corpus aggregation is never smoothed.
  bool smooth = true;
  bool case_fold = false;
};

// 13a-style tokenization: ASCII punctuation split off, period/comma kept
// only between digits, digit-hyphen split, whitespace collapse. The usual
// entity unescapes (&quot; &amp; &lt; &gt;) are applied first.
std::vector<std::string> tokenize_13a(std::string_view text, bool case_fold);

// Smoothed sentence BLEU in [0,1]. Clipping is max over references, brevity
// penalty uses the closest reference length (ties to the shorter one).
// Empty hypothesis scores 0. Throws std::invalid_argument when refs is empty.
double sentence_bleu(const std::vector<std::string>& hyp,
                     const std::vector<std::vector<std::string>>& refs,
                     const BleuParams& params);

// Corpus BLEU on the 0-100 scale: counts are summed over segments before
// the ratios are taken, no smoothing. Throws std::invalid_argument on an
// empty corpus or a hyps/refs length mismatch.
double corpus_bleu(const std::vector<std::vector<std::string>>& hyps,
                   const std::vector<std::vector<std::vector<std::string>>>& refs_list,
                   const BleuParams& params);

// Text identity used for alignment evaluation: whitespace collapse plus
// optional case folding.
std::string normalize_eval_text(std::string_view text, bool case_fold);

// Deduplicated gold pairs under normalize_eval_text.
struct GoldSet {
  bool case_fold = false;
  std::set<std::pair<std::string, std::string>> pairs;

  static GoldSet from_pairs(const std::vector<SentencePair>& pairs,
                            bool case_fold);
};

// Dedups pred under the gold set's normalization, then
// P = |P∩G|/|P| (0 when P empty), R = |P∩G|/|G|, F1 = harmonic mean.
AlignReport precision_recall_f1(const std::vector<SentencePair>& pred,
                                const GoldSet& gold);

}  // namespace bitext::metrics
