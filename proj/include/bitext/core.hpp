#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bitext {

// One side of a bitext: an ordered list of sentences.
struct Document {
  std::string lang;
  std::string doc_id;
  std::vector<std::string> sentences;
};

// Builds a Document, applying ingestion cleanup: TAB/newline inside a
// sentence become a single space, surrounding whitespace is trimmed.
// Throws ValidationError if a sentence is empty after the trim.
Document make_document(std::string lang, std::string doc_id,
                       std::vector<std::string> sentences);

struct DocumentPair {
  Document src;
  Document tgt;
  std::string pair_id;
};

// Throws ValidationError when doc ids or languages coincide.
DocumentPair make_document_pair(Document src, Document tgt,
                                std::string pair_id);

// A bead: a group of source sentence indices aligned to a group of target
// sentence indices. One side may be empty (an unaligned 1-0 / 0-1 bead),
// never both. Indices are strictly increasing.
struct AlignmentLink {
  std::vector<int> src_idx;
  std::vector<int> tgt_idx;
  bool operator==(const AlignmentLink&) const = default;
  bool operator<(const AlignmentLink& o) const {
    if (src_idx != o.src_idx) return src_idx < o.src_idx;
    return tgt_idx < o.tgt_idx;
  }
};

// Sorts, deduplicates and validates (negatives rejected, both-empty rejected).
AlignmentLink make_link(std::vector<int> src_idx, std::vector<int> tgt_idx);

// One extracted training example.
struct SentencePair {
  std::string src_text;
  std::string tgt_text;
  std::string origin_doc;  // provenance; empty when unknown
  std::optional<AlignmentLink> origin_link;

  bool same_text(const SentencePair& o) const {
    return src_text == o.src_text && tgt_text == o.tgt_text;
  }
};

// Validates non-empty, TAB/newline-free texts.
SentencePair make_sentence_pair(std::string src_text, std::string tgt_text,
                                std::string origin_doc = {},
                                std::optional<AlignmentLink> link = {});

struct AlignReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
  std::size_t n_correct = 0;
};

// 2PR/(P+R), or 0 when P+R == 0.
double f1_score(double precision, double recall);

AlignReport make_align_report(std::size_t n_pred, std::size_t n_gold,
                              std::size_t n_correct);

// Link file grammar: "<ints-comma-separated>:<ints-comma-separated>",
// at most one side empty. parse normalizes (sorted, deduplicated).
AlignmentLink parse_link_line(std::string_view line);
std::string serialize_link(const AlignmentLink& link);

// Expands links over a document pair. Links with both sides non-empty yield
// one pair each, sides joined by a single space in index order; 1-0 / 0-1
// beads yield nothing. Throws ValidationError on an out-of-range index,
// naming the document and index.
std::vector<SentencePair> expand_links(const std::vector<AlignmentLink>& links,
                                       const DocumentPair& pair);

// Unicode-aware whitespace normalization: trim plus collapse runs to a
// single ASCII space. The identity used for pair comparison everywhere.
std::string collapse_ws(std::string_view text);

}  // namespace bitext
