#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bitext/core.hpp"

namespace bitext::align {

// Bead shapes the length aligner considers.
enum class Bead { OneOne, OneZero, ZeroOne, TwoOne, OneTwo, TwoTwo };

// Priors need not form a distribution; the classic length-model constants.
struct BeadPriors {
  double one_one = 0.89;
  double one_zero = 0.0099;
  double zero_one = 0.0099;
  double two_one = 0.089;
  double one_two = 0.089;
  double two_two = 0.011;

  double get(Bead b) const;
};

// Bilingual lexicon: lowercased source token -> set of target tokens.
struct BilingualLexicon {
  std::unordered_map<std::string, std::unordered_set<std::string>> entries;

  bool empty() const { return entries.empty(); }
  // TSV src<TAB>tgt, duplicates merged.
  static BilingualLexicon load(const std::string& path);
};

struct LengthAlignParams {
  double mean_ratio = 1.0;  // expected target chars per source char
  double variance = 6.8;
  BeadPriors priors;
  const BilingualLexicon* dictionary = nullptr;  // optional similarity boost
  double dict_weight = 0.35;
};

// -log prior(bead) - log(2*(1-Phi(|delta|))) with
// delta = (l2 - l1*c)/sqrt(l1*s2); the role-swapped form when l1 == 0.
// Lengths are in characters. Throws std::invalid_argument when both are 0.
double gale_church_cost(double l1, double l2, Bead bead,
                        const LengthAlignParams& params);

// Minimal-cost monotone bead cover of both documents by dynamic programming.
// With a dictionary, each bead's cost is reduced by dict_weight times the
// fraction of its source tokens that have a lexicon translation present on
// the bead's target side. Emits 1-0/0-1 beads for unaligned sentences.
std::vector<AlignmentLink> align_length(const std::vector<std::string>& src,
                                        const std::vector<std::string>& tgt,
                                        const LengthAlignParams& params);

struct BleuAlignParams {
  int max_ngram = 2;
  double anchor_threshold = 0.10;
  bool gap_fill = true;
};

// Anchor-based alignment through a machine translation of the source:
// picks the highest-total-similarity strictly monotone set of 1-1 anchors
// with smoothed sentence BLEU >= anchor_threshold, then 1-1 fills interior
// gaps whose sizes match. Unanchored sentences yield no links.
std::vector<AlignmentLink> align_bleu(
    const std::vector<std::string>& src_translated,
    const std::vector<std::string>& tgt, const BleuAlignParams& params);

// Deterministic positional aligner for bullet-structured legal documents.
struct BulletAlignResult {
  std::vector<AlignmentLink> links;
  std::vector<std::string> src_units;
  std::vector<std::string> tgt_units;
  std::vector<std::string> diagnostics;  // skipped sections, counts
};

// Splits both sides into units (lines terminated by ';', danda, '.', or
// opened by a list marker), groups units into blank-line-separated sections,
// and emits positional 1-1 links for sections with equal unit counts.
// Sections with unequal counts are skipped and reported.
BulletAlignResult align_bullets(std::string_view src_doc,
                                std::string_view tgt_doc);

// Unit extraction used by align_bullets; one vector per section.
std::vector<std::vector<std::string>> bullet_sections(std::string_view text);

}  // namespace bitext::align
